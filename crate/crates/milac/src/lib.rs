//! Desk-scale simulator and toolkit for MiLAC (microwave linear analog
//! computer) beamforming.
//!
//! A MiLAC is a reconfigurable P-port microwave network of tunable
//! admittance components that maps the signals applied on its input ports
//! linearly onto its output ports. Configured appropriately, the network
//! computes matrix expressions — linear estimators, MIMO precoders and
//! combiners, the DFT — directly in the analog domain. This crate provides:
//!
//! * [`numerics`] — a dense complex linear-algebra kernel with explicit
//!   conditioning diagnostics;
//! * [`network`] — the physical MiLAC model: admittance grid, network
//!   matrices, component synthesis, and two independent circuit simulators
//!   that must agree;
//! * [`estimators`] — closed-form linear MMSE estimation and its special
//!   cases (GLS, GMF, RLS, OLS, OMF), plus the network builders that make a
//!   MiLAC compute each one;
//! * [`beamforming`] — synthesis of arbitrary precoders/combiners, the
//!   LMMSE-inspired transmit/receive strategies, and the fixed DFT network;
//! * [`linksim`] — seeded Monte-Carlo link-level experiments (sum rate,
//!   BER, noisy CSI, quantized components);
//! * [`complexity`] — exact per-coherence-block operation counts for
//!   digital versus MiLAC realizations.
//!
//! All library values are immutable after construction and all operations
//! are pure functions, so everything is safe to share across threads.

pub mod beamforming;
pub mod complexity;
pub mod error;
pub mod estimators;
pub mod fft;
pub mod linksim;
pub mod network;
pub mod numerics;
pub mod testutil;

pub use error::{Error, Result};
pub use numerics::ComplexMatrix;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
