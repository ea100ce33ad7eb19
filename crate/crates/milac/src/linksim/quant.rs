//! Optimal scalar quantization of tunable admittance components.
//!
//! When a network computes an R-ZFBF-style matrix from the channel, its
//! nonzero off-diagonal components are scaled copies of the channel
//! entries, so under Rayleigh fading their real and imaginary parts are
//! Gaussian. [`lloyd_max_codebook`] builds the minimum-MSE quantizer for a
//! unit-variance Gaussian source (levels at the conditional means,
//! thresholds at the level midpoints), and [`quantize_network`] applies it
//! per real dimension to a synthesized component grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::MilacNetwork;
use crate::numerics::ComplexMatrix;

/// Largest supported resolution per real dimension. Beyond this the tail
/// bins carry too little probability mass for the iteration to settle.
const MAX_BITS: u32 = 8;
/// Lloyd iteration stops when no level moves more than this.
const LEVEL_TOL: f64 = 1e-12;

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Minimum-MSE scalar quantizer for a unit-variance Gaussian source.
#[derive(Debug, Clone)]
pub struct QuantizerCodebook {
    bits_per_real_dim: u32,
    /// Strictly increasing reconstruction levels, symmetric about zero.
    levels: Vec<f64>,
    /// Decision boundaries: midpoints between adjacent levels.
    thresholds: Vec<f64>,
}

impl QuantizerCodebook {
    pub fn bits_per_real_dim(&self) -> u32 {
        self.bits_per_real_dim
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Quantize a unit-scale sample. A sample exactly on a threshold maps
    /// to the upper bin.
    pub fn quantize(&self, x: f64) -> f64 {
        let idx = self.thresholds.partition_point(|&t| t <= x);
        self.levels[idx]
    }

    /// Quantize a sample from a source with standard deviation `sigma`.
    pub fn quantize_scaled(&self, x: f64, sigma: f64) -> f64 {
        self.quantize(x / sigma) * sigma
    }

    /// Exact mean squared error against the unit-variance Gaussian,
    /// integrated bin by bin in closed form.
    pub fn mse(&self) -> f64 {
        let mut mse = 0.0;
        for (i, &c) in self.levels.iter().enumerate() {
            let a = if i == 0 { f64::NEG_INFINITY } else { self.thresholds[i - 1] };
            let b = if i == self.levels.len() - 1 {
                f64::INFINITY
            } else {
                self.thresholds[i]
            };
            mse += bin_square_error(a, b, c);
        }
        mse
    }

    /// Signal-to-quantization-noise ratio in dB for the unit-variance
    /// Gaussian source.
    pub fn sqnr_db(&self) -> f64 {
        -10.0 * self.mse().log10()
    }
}

/// `E[(X - c)^2 1{a < X <= b}]` for standard normal X.
fn bin_square_error(a: f64, b: f64, c: f64) -> f64 {
    let (phi_a, cdf_a) = if a.is_finite() {
        (normal_pdf(a), normal_cdf(a))
    } else {
        (0.0, 0.0)
    };
    let (phi_b, cdf_b) = if b.is_finite() {
        (normal_pdf(b), normal_cdf(b))
    } else {
        (0.0, 1.0)
    };
    let mass = cdf_b - cdf_a;
    let mean_term = phi_a - phi_b;
    let square_term = mass + (if a.is_finite() { a * phi_a } else { 0.0 })
        - (if b.is_finite() { b * phi_b } else { 0.0 });
    square_term - 2.0 * c * mean_term + c * c * mass
}

/// Fixed point of the Lloyd iteration for a unit-variance Gaussian:
/// thresholds are level midpoints and each level is the conditional mean
/// of its bin. Iterates until the largest level movement drops below
/// `1e-12`.
pub fn lloyd_max_codebook(bits_per_real_dim: u32) -> Result<QuantizerCodebook> {
    if bits_per_real_dim == 0 || bits_per_real_dim > MAX_BITS {
        return Err(Error::InvalidParameter(format!(
            "bits per real dimension must be in 1..={MAX_BITS}, got {bits_per_real_dim}"
        )));
    }
    let n_levels = 1usize << bits_per_real_dim;
    let mut levels: Vec<f64> = (0..n_levels)
        .map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / n_levels as f64)
        .collect();
    let mut thresholds = vec![0.0; n_levels - 1];
    for _ in 0..1_000_000 {
        for i in 0..n_levels - 1 {
            thresholds[i] = 0.5 * (levels[i] + levels[i + 1]);
        }
        let mut max_move: f64 = 0.0;
        for i in 0..n_levels {
            let a = if i == 0 { f64::NEG_INFINITY } else { thresholds[i - 1] };
            let b = if i == n_levels - 1 { f64::INFINITY } else { thresholds[i] };
            let (phi_a, cdf_a) = if a.is_finite() {
                (normal_pdf(a), normal_cdf(a))
            } else {
                (0.0, 0.0)
            };
            let (phi_b, cdf_b) = if b.is_finite() {
                (normal_pdf(b), normal_cdf(b))
            } else {
                (0.0, 1.0)
            };
            let mass = cdf_b - cdf_a;
            if mass <= 0.0 {
                return Err(Error::InvalidParameter(
                    "Lloyd iteration produced an empty bin".into(),
                ));
            }
            let centroid = (phi_a - phi_b) / mass;
            max_move = max_move.max((centroid - levels[i]).abs());
            levels[i] = centroid;
        }
        if max_move < LEVEL_TOL {
            // Symmetrize exactly; the iteration preserves symmetry up to
            // rounding.
            for i in 0..n_levels / 2 {
                let v = 0.5 * (levels[n_levels - 1 - i] - levels[i]);
                levels[i] = -v;
                levels[n_levels - 1 - i] = v;
            }
            for i in 0..n_levels - 1 {
                thresholds[i] = 0.5 * (levels[i] + levels[i + 1]);
            }
            return Ok(QuantizerCodebook {
                bits_per_real_dim,
                levels,
                thresholds,
            });
        }
    }
    Err(Error::InvalidParameter("Lloyd iteration did not converge".into()))
}

/// Quantize the off-diagonal components of a synthesized network.
///
/// The codebook is scaled to the empirical RMS (per real dimension) of the
/// nonzero off-diagonal components of this network. Components that are
/// exactly zero denote absent hardware and pass through untouched, as do
/// the grounding components `Y[k][k]` — those are few and freely tunable,
/// and are recomputed here so that the diagonal of the network matrix P is
/// preserved exactly. The off-diagonal entries of P are therefore the only
/// quantities the quantization perturbs.
pub fn quantize_network(net: &MilacNetwork, codebook: &QuantizerCodebook) -> Result<MilacNetwork> {
    let ports = net.ports();
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for i in 0..ports {
        for k in 0..ports {
            if i == k {
                continue;
            }
            let z = net.component(i, k);
            if z != Complex64::new(0.0, 0.0) {
                sum_sq += z.re * z.re + z.im * z.im;
                count += 2;
            }
        }
    }
    if count == 0 {
        return Ok(net.clone());
    }
    let sigma = (sum_sq / count as f64).sqrt();
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "component spread {sigma} is not quantizable"
        )));
    }

    let mut grid = ComplexMatrix::zeros(ports, ports);
    for k in 0..ports {
        let mut orig_col_sum = Complex64::new(0.0, 0.0);
        let mut new_col_sum = Complex64::new(0.0, 0.0);
        for i in 0..ports {
            orig_col_sum += net.component(i, k);
            if i == k {
                continue;
            }
            let z = net.component(i, k);
            let q = if z == Complex64::new(0.0, 0.0) {
                z
            } else {
                Complex64::new(
                    codebook.quantize_scaled(z.re, sigma),
                    codebook.quantize_scaled(z.im, sigma),
                )
            };
            grid[(i, k)] = q;
            new_col_sum += q;
        }
        // Grounding component absorbs the column quantization error so the
        // diagonal of P stays exact.
        grid[(k, k)] = orig_col_sum - new_col_sum;
    }
    MilacNetwork::new(net.n_in(), net.m_out(), net.y0(), grid)
}
