//! MiLAC configurations for precoding and combining, with their digital
//! counterparts.
//!
//! Three synthesis routes are provided:
//!
//! * **Arbitrary matrices** — [`arbitrary_tx_network`] / [`arbitrary_rx_network`]
//!   realize any given precoder `W` (or combiner `G`) by placing scaled
//!   copies of its entries in the input-to-output component block; the
//!   network then computes `W s` (or `G y`) in the analog domain.
//! * **LMMSE-inspired strategies** — [`lmmse_inspired_network`] configures
//!   the network to *compute* the R-ZFBF/ZFBF/MBF transmit or MMSE/ZF/MF
//!   receive matrix from the channel itself, reusing the estimator
//!   layouts from [`crate::estimators`].
//! * **Fixed DFT** — [`dft_network`] realizes the unitary DFT matrix with a
//!   fixed component grid, set once and never reconfigured.
//!
//! Digital reference implementations ([`precoder_digital`],
//! [`combiner_digital`], [`dft_matrix`]) back every analog path with an
//! independently computed matrix for equivalence testing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimators::{self, EstimatorForm, EstimatorKind, EstimatorTag, ObservationModel, SignBranch};
use crate::network::{MilacNetwork, PartitionedP};
use crate::numerics::ComplexMatrix;

/// Beamforming strategy tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Explicitly supplied matrix.
    Arbitrary,
    /// Regularized zero-forcing transmit precoding.
    RZfbf,
    /// Zero-forcing transmit precoding.
    Zfbf,
    /// Matched transmit beamforming.
    Mbf,
    /// MMSE receive combining.
    Mmse,
    /// Zero-forcing receive combining.
    Zf,
    /// Matched-filter receive combining.
    Mf,
    /// Fixed DFT combining.
    Dft,
}

impl Strategy {
    pub fn is_transmit(self) -> bool {
        matches!(self, Strategy::Arbitrary | Strategy::RZfbf | Strategy::Zfbf | Strategy::Mbf)
    }

    pub fn is_receive(self) -> bool {
        matches!(
            self,
            Strategy::Arbitrary | Strategy::Mmse | Strategy::Zf | Strategy::Mf | Strategy::Dft
        )
    }
}

/// Which end of the link the beamformer sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Transmitter,
    Receiver,
}

/// Power normalization applied to a transmit precoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Every column scaled to unit norm (per-user uniform power). Only
    /// available when the matrix is computed digitally.
    PerColumn,
    /// Whole matrix scaled so its Frobenius norm is `sqrt(n_columns)`; the
    /// normalization used when the matrix is computed by the network and
    /// its columns cannot be scaled individually.
    FrobeniusGlobal,
    /// No scaling.
    None,
}

/// A beamformer request: strategy, link side, regularizer, normalization
/// and (for [`Strategy::Arbitrary`]) the explicit matrix.
#[derive(Debug, Clone)]
pub struct BeamformerSpec {
    pub strategy: Strategy,
    pub side: Side,
    pub lambda: f64,
    pub normalization: Normalization,
    pub matrix: Option<ComplexMatrix>,
}

impl BeamformerSpec {
    pub fn validate(&self) -> Result<()> {
        match self.side {
            Side::Transmitter if !self.strategy.is_transmit() => {
                return Err(Error::InvalidParameter(format!(
                    "{:?} is not a transmit strategy",
                    self.strategy
                )))
            }
            Side::Receiver if !self.strategy.is_receive() => {
                return Err(Error::InvalidParameter(format!(
                    "{:?} is not a receive strategy",
                    self.strategy
                )))
            }
            _ => {}
        }
        if matches!(self.strategy, Strategy::RZfbf | Strategy::Mmse | Strategy::Mbf | Strategy::Mf)
            && !(self.lambda > 0.0 && self.lambda.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "{:?} needs a positive regularizer, got {}",
                self.strategy, self.lambda
            )));
        }
        if self.strategy == Strategy::Arbitrary && self.matrix.is_none() {
            return Err(Error::InvalidParameter(
                "arbitrary beamforming needs an explicit matrix".into(),
            ));
        }
        Ok(())
    }
}

/// Network that applies a fixed precoder `W` (n_t × n_s) to the symbol
/// vector fed on its first `n_s` ports: `v_out = W s` with `v_in = s`.
///
/// The synthesized grid is sparse: the only nonzero off-diagonal
/// components sit in the input-to-output block, `Y[n_s + r][k] = y0 W[r][k]`,
/// and the only nonzero grounding components sit under the input ports,
/// `Y[k][k] = -y0 * (column sum of W)`.
pub fn arbitrary_tx_network(w: &ComplexMatrix, y0: f64) -> Result<MilacNetwork> {
    let n_s = w.cols();
    let n_t = w.rows();
    if n_s == 0 || n_t == 0 {
        return Err(Error::InvalidParameter("beamforming matrix must be nonempty".into()));
    }
    let ports = n_s + n_t;
    let mut grid = ComplexMatrix::zeros(ports, ports);
    for k in 0..n_s {
        let mut col_sum = Complex64::new(0.0, 0.0);
        for r in 0..n_t {
            grid[(n_s + r, k)] = w[(r, k)] * y0;
            col_sum += w[(r, k)];
        }
        grid[(k, k)] = -col_sum * y0;
    }
    MilacNetwork::new(n_s, n_t, y0, grid)
}

/// Mirror of [`arbitrary_tx_network`] for a combiner `G` (n_s × n_r):
/// the received signal enters on `n_r` ports and `v_out = G y`.
pub fn arbitrary_rx_network(g: &ComplexMatrix, y0: f64) -> Result<MilacNetwork> {
    let n_r = g.cols();
    let n_s = g.rows();
    if n_r == 0 || n_s == 0 {
        return Err(Error::InvalidParameter("combining matrix must be nonempty".into()));
    }
    let ports = n_r + n_s;
    let mut grid = ComplexMatrix::zeros(ports, ports);
    for k in 0..n_r {
        let mut col_sum = Complex64::new(0.0, 0.0);
        for r in 0..n_s {
            grid[(n_r + r, k)] = g[(r, k)] * y0;
            col_sum += g[(r, k)];
        }
        grid[(k, k)] = -col_sum * y0;
    }
    MilacNetwork::new(n_r, n_s, y0, grid)
}

/// Unnormalized digital precoder for an `n_r x n_t` downlink channel
/// (`n_r <= n_t`): `F_RZFBF = H^H (H H^H + lambda I)^-1`,
/// `F_ZFBF = H^H (H H^H)^-1`, `F_MBF = H^H`.
pub fn precoder_unnormalized(strategy: Strategy, h: &ComplexMatrix, lambda: f64) -> Result<ComplexMatrix> {
    if h.rows() > h.cols() {
        return Err(Error::InvalidParameter(format!(
            "transmit precoding needs n_r <= n_t, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let hh = h.hermitian();
    match strategy {
        Strategy::RZfbf => {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "regularized zero-forcing needs lambda > 0, got {lambda}"
                )));
            }
            let inner = h.mat_mul(&hh)?.add(&ComplexMatrix::scaled_identity(
                h.rows(),
                Complex64::new(lambda, 0.0),
            ))?;
            // H^H (H H^H + lambda I)^-1 computed as the adjoint of a solve.
            Ok(inner
                .solve(h)
                .map_err(|e| e.named("H H^H + lambda I"))?
                .hermitian())
        }
        Strategy::Zfbf => {
            let inner = h.mat_mul(&hh)?;
            Ok(inner.solve(h).map_err(|e| e.named("H H^H"))?.hermitian())
        }
        Strategy::Mbf => Ok(hh),
        other => Err(Error::InvalidParameter(format!(
            "{other:?} is not a digital precoding strategy"
        ))),
    }
}

/// Digital precoder with the requested power normalization applied.
pub fn precoder_digital(
    strategy: Strategy,
    h: &ComplexMatrix,
    lambda: f64,
    normalization: Normalization,
) -> Result<ComplexMatrix> {
    let f = precoder_unnormalized(strategy, h, lambda)?;
    normalize_precoder(&f, normalization)
}

/// Apply a [`Normalization`] to an unnormalized precoding matrix.
pub fn normalize_precoder(f: &ComplexMatrix, normalization: Normalization) -> Result<ComplexMatrix> {
    match normalization {
        Normalization::None => Ok(f.clone()),
        Normalization::PerColumn => {
            let mut w = f.clone();
            for k in 0..f.cols() {
                let norm = f.column_entries(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "column {k} of the precoder is zero; cannot normalize"
                    )));
                }
                for i in 0..f.rows() {
                    w[(i, k)] = f[(i, k)] / norm;
                }
            }
            Ok(w)
        }
        Normalization::FrobeniusGlobal => {
            let norm = f.frobenius_norm();
            if norm == 0.0 {
                return Err(Error::InvalidParameter("zero precoder cannot be normalized".into()));
            }
            Ok(f.scale_re((f.cols() as f64).sqrt() / norm))
        }
    }
}

/// Digital combiner for an `n_r x n_t` uplink channel (`n_r >= n_t`):
/// `G_MMSE = (H^H H + lambda I)^-1 H^H`, `G_ZF = (H^H H)^-1 H^H`,
/// `G_MF = lambda^-1 H^H`.
pub fn combiner_digital(strategy: Strategy, h: &ComplexMatrix, lambda: f64) -> Result<ComplexMatrix> {
    if h.rows() < h.cols() {
        return Err(Error::InvalidParameter(format!(
            "receive combining needs n_r >= n_t, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let hh = h.hermitian();
    match strategy {
        Strategy::Mmse => {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "MMSE combining needs lambda > 0, got {lambda}"
                )));
            }
            let gram = hh.mat_mul(h)?.add(&ComplexMatrix::scaled_identity(
                h.cols(),
                Complex64::new(lambda, 0.0),
            ))?;
            gram.solve(&hh).map_err(|e| e.named("H^H H + lambda I"))
        }
        Strategy::Zf => {
            let gram = hh.mat_mul(h)?;
            gram.solve(&hh).map_err(|e| e.named("H^H H"))
        }
        Strategy::Mf => {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "matched filtering needs lambda > 0, got {lambda}"
                )));
            }
            Ok(hh.scale_re(1.0 / lambda))
        }
        other => Err(Error::InvalidParameter(format!(
            "{other:?} is not a digital combining strategy"
        ))),
    }
}

/// Optimal regularizer for MMSE/MF combining under uniform transmit power:
/// `n_t sigma_n^2 / p_t`.
pub fn optimal_lambda(n_t: usize, sigma2: f64, p_t: f64) -> f64 {
    n_t as f64 * sigma2 / p_t
}

fn lmmse_kind_for(spec: &BeamformerSpec) -> Result<(EstimatorTag, EstimatorForm)> {
    match (spec.side, spec.strategy) {
        (Side::Transmitter, Strategy::RZfbf) => Ok((EstimatorTag::Rls, EstimatorForm::Form2)),
        (Side::Transmitter, Strategy::Zfbf) => Ok((EstimatorTag::Ols, EstimatorForm::Form2)),
        (Side::Transmitter, Strategy::Mbf) => Ok((EstimatorTag::Omf, EstimatorForm::Form2)),
        (Side::Receiver, Strategy::Mmse) => Ok((EstimatorTag::Rls, EstimatorForm::Form1)),
        (Side::Receiver, Strategy::Zf) => Ok((EstimatorTag::Ols, EstimatorForm::Form1)),
        (Side::Receiver, Strategy::Mf) => Ok((EstimatorTag::Omf, EstimatorForm::Form1)),
        (side, strategy) => Err(Error::InvalidParameter(format!(
            "{strategy:?} on the {side:?} side has no estimator-computed network"
        ))),
    }
}

/// Partitioned P matrix of the LMMSE-inspired network for `spec` over the
/// channel `h`. Transmit strategies use the Y×Y-inverting layouts, receive
/// strategies the X×X-inverting ones; in both cases the network has
/// `N = n_r` input ports.
pub fn lmmse_inspired_p(spec: &BeamformerSpec, h: &ComplexMatrix) -> Result<PartitionedP> {
    spec.validate()?;
    let (tag, form) = lmmse_kind_for(spec)?;
    let lambda = if tag.uses_lambda() { spec.lambda } else { 1.0 };
    let model = ObservationModel::with_identity_covariances(h.clone(), lambda)?;
    estimators::build_p(&model, EstimatorKind::new(tag, form), SignBranch::Upper)
}

/// Network that computes the LMMSE-inspired beamforming matrix of `spec`
/// in the analog domain. Feeding `u` on the input ports returns the
/// *unnormalized* matrix applied to `u`:
/// `H^H (H H^H + lambda I)^-1 u` for R-ZFBF, `H^H (H H^H)^-1 u` for ZFBF,
/// `lambda^-1 H^H u` for MBF, and the mirror expressions for the receive
/// strategies.
pub fn lmmse_inspired_network(spec: &BeamformerSpec, h: &ComplexMatrix, y0: f64) -> Result<MilacNetwork> {
    MilacNetwork::from_p(&lmmse_inspired_p(spec, h)?, y0)
}

/// Rescale the response of an estimator-computed network by `gain`,
/// returning the adjusted network.
///
/// Every entry of the input-port rows of P is divided by `gain`, which
/// scales the whole solution of `P v = [u; 0]` — and hence the computed
/// beamforming matrix — by `gain`, leaving the estimator structure intact.
/// Used to realize the global Frobenius power normalization inside the
/// network when the beamforming matrix is computed in the analog domain;
/// the scalar itself is obtained digitally from the channel.
pub fn scale_network_response(p: &PartitionedP, gain: f64, y0: f64) -> Result<MilacNetwork> {
    if !(gain.is_finite() && gain != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "response gain must be finite and nonzero, got {gain}"
        )));
    }
    let scaled = PartitionedP::new(
        p.p11.scale_re(1.0 / gain),
        p.p12.scale_re(1.0 / gain),
        p.p21.clone(),
        p.p22.clone(),
    )?;
    MilacNetwork::from_p(&scaled, y0)
}

/// Unitary DFT matrix of order `n`:
/// `[G]_{ik} = exp(-j 2 pi i k / n) / sqrt(n)` (0-based indices).
pub fn dft_matrix(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |i, k| {
        let ang = -2.0 * std::f64::consts::PI * (i as f64) * (k as f64) / n as f64;
        Complex64::new(ang.cos() * scale, ang.sin() * scale)
    })
}

/// Fixed network computing the `n_r`-point unitary DFT of the signal on
/// its first `n_r` ports.
///
/// The grid is written directly in closed form: the input-to-output block
/// holds `y0 exp(-j 2 pi r c / n_r) / sqrt(n_r)`, the first grounding
/// component is `-y0 sqrt(n_r)` (the only column of the DFT matrix with a
/// nonzero sum) and every other component is zero.
pub fn dft_network(n_r: usize, y0: f64) -> Result<MilacNetwork> {
    if n_r == 0 {
        return Err(Error::InvalidParameter("DFT size must be at least 1".into()));
    }
    let ports = 2 * n_r;
    let scale = y0 / (n_r as f64).sqrt();
    let mut grid = ComplexMatrix::zeros(ports, ports);
    for c in 0..n_r {
        for r in 0..n_r {
            let ang = -2.0 * std::f64::consts::PI * (r as f64) * (c as f64) / n_r as f64;
            grid[(n_r + r, c)] = Complex64::new(ang.cos() * scale, ang.sin() * scale);
        }
    }
    grid[(0, 0)] = Complex64::new(-y0 * (n_r as f64).sqrt(), 0.0);
    MilacNetwork::new(n_r, n_r, y0, grid)
}
