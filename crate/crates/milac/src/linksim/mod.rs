//! Seeded Monte-Carlo link-level experiments.
//!
//! Channels are i.i.d. Rayleigh with unit path gain, modulation is
//! Gray-mapped QPSK, and every experiment is driven by a named 64-bit seed.
//! Trial `t` draws from ChaCha8 stream `t` keyed by the experiment seed, so
//! trials are independent, reproducible, and schedule-invariant: running
//! them in parallel or serially produces bit-identical results.

pub mod experiments;
pub mod quant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

pub use experiments::{
    curves_to_csv, run_ber, run_noisy_csi, run_perf_vs_complexity, run_quantized, run_sumrate,
    tx_weights, BerCount, BerRun, CurvePoint, SumRateRun, SumRateStrategy, WeightRealization,
};
pub use quant::{lloyd_max_codebook, quantize_network, QuantizerCodebook};

/// Parameters shared by the Monte-Carlo experiments.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    /// Transmit antennas.
    pub n_t: usize,
    /// Receive antennas (multi-user experiments: single-antenna users).
    pub n_r: usize,
    /// SNR grid, `P_T / sigma_n^2` in dB.
    pub snr_db: Vec<f64>,
    /// Independent channel realizations.
    pub trials: usize,
    /// Symbol vectors per realization (bit-level experiments).
    pub symbols_per_trial: usize,
    /// Experiment seed.
    pub seed: u64,
    /// Transmit power `P_T`; the noise power at SNR s dB is
    /// `P_T 10^(-s/10)`.
    pub tx_power: f64,
}

impl LinkConfig {
    fn validate_common(&self) -> Result<()> {
        if self.n_t == 0 || self.n_r == 0 {
            return Err(Error::Config("antenna counts must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("snr_db grid must not be empty".into()));
        }
        if !self.snr_db.iter().all(|s| s.is_finite()) {
            return Err(Error::Config("snr_db entries must be finite".into()));
        }
        if !(self.tx_power.is_finite() && self.tx_power > 0.0) {
            return Err(Error::Config(format!(
                "tx_power must be finite and positive, got {}",
                self.tx_power
            )));
        }
        Ok(())
    }

    /// Validation for downlink (multi-user MISO) experiments.
    pub fn validate_tx(&self) -> Result<()> {
        self.validate_common()?;
        if self.n_r > self.n_t {
            return Err(Error::Config(format!(
                "transmit experiments need n_r <= n_t, got n_r = {}, n_t = {}",
                self.n_r, self.n_t
            )));
        }
        Ok(())
    }

    /// Validation for uplink (single-user MIMO) experiments.
    pub fn validate_rx(&self) -> Result<()> {
        self.validate_common()?;
        if self.n_r < self.n_t {
            return Err(Error::Config(format!(
                "receive experiments need n_r >= n_t, got n_r = {}, n_t = {}",
                self.n_r, self.n_t
            )));
        }
        if self.symbols_per_trial == 0 {
            return Err(Error::Config("symbols_per_trial must be at least 1".into()));
        }
        Ok(())
    }

    /// Noise power at a grid point.
    pub fn sigma2(&self, snr_db: f64) -> f64 {
        self.tx_power * 10f64.powf(-snr_db / 10.0)
    }
}

/// Generator for trial `trial` of the experiment seeded with `seed`:
/// ChaCha8 keyed by the seed, with the trial index selecting the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// i.i.d. Rayleigh channel with unit path gain: every entry is
/// circularly-symmetric complex Gaussian with unit variance. Entries are
/// drawn row-major, real part before imaginary part.
pub fn rayleigh_channel(n_r: usize, n_t: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(n_r, n_t, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Imperfect channel knowledge: the true channel plus white complex
/// Gaussian error with per-entry variance `10^(-rho_db/10)` (relative to
/// the unit-variance channel entries). The estimate is not rescaled.
pub fn noisy_csi(h: &ComplexMatrix, rho_db: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let err_var = 10f64.powf(-rho_db / 10.0);
    let s = (err_var / 2.0).sqrt();
    ComplexMatrix::from_fn(h.rows(), h.cols(), |i, k| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        h[(i, k)] + Complex64::new(re * s, im * s)
    })
}

/// Gray-mapped QPSK with unit average symbol energy: bit pair `(b0, b1)`
/// selects the quadrant `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`, so `00`
/// maps to `(+1+j)/sqrt(2)` and adjacent quadrants differ in one bit.
pub fn qpsk_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(Error::InvalidParameter("QPSK needs an even number of bits".into()));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidParameter("bits must be 0 or 1".into()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(bits
        .chunks(2)
        .map(|pair| {
            Complex64::new(
                (1.0 - 2.0 * pair[0] as f64) * s,
                (1.0 - 2.0 * pair[1] as f64) * s,
            )
        })
        .collect())
}

/// Hard QPSK decision per real dimension: negative real part sets the
/// first bit, negative imaginary part the second.
pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for z in symbols {
        bits.push(u8::from(z.re < 0.0));
        bits.push(u8::from(z.im < 0.0));
    }
    bits
}

/// Multi-user downlink sum rate in bits/s/Hz under uniform power
/// allocation: user `k` sees signal power `(p_t / n_users) |h_k w_k|^2`,
/// interference `(p_t / n_users) sum_{j != k} |h_k w_j|^2` and noise
/// `sigma2`, and the rate is `sum_k log2(1 + SINR_k)`.
pub fn sum_rate(h: &ComplexMatrix, w: &ComplexMatrix, p_t: f64, sigma2: f64) -> Result<f64> {
    if h.cols() != w.rows() || h.rows() != w.cols() {
        return Err(Error::Shape {
            op: "sum_rate",
            lhs_rows: h.rows(),
            lhs_cols: h.cols(),
            rhs_rows: w.rows(),
            rhs_cols: w.cols(),
        });
    }
    let n_users = h.rows();
    let hw = h.mat_mul(w)?;
    let per_user_power = p_t / n_users as f64;
    let mut rate = 0.0;
    for k in 0..n_users {
        let signal = per_user_power * hw[(k, k)].norm_sqr();
        let mut interference = 0.0;
        for j in 0..n_users {
            if j != k {
                interference += per_user_power * hw[(k, j)].norm_sqr();
            }
        }
        rate += (1.0 + signal / (interference + sigma2)).log2();
    }
    Ok(rate)
}

/// Average BER of QPSK through a 1x1 Rayleigh channel with ZF equalization
/// at SNR `p_t/sigma2` (linear): each real dimension is binary signalling
/// with mean branch SNR `snr/2`, giving
/// `0.5 (1 - sqrt(g / (1 + g)))` with `g = snr / 2`.
pub fn rayleigh_zf_qpsk_ber(snr_linear: f64) -> f64 {
    let g = snr_linear / 2.0;
    0.5 * (1.0 - (g / (1.0 + g)).sqrt())
}
