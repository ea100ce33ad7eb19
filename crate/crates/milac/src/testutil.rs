//! Deterministic random fixtures shared by the test suites.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::ComplexMatrix;

/// Seeded generator for reproducible tests.
pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. circularly-symmetric complex Gaussian entries of unit
/// variance (real and imaginary parts each with variance 1/2).
pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Square matrix with singular values bounded away from zero
/// (`I + G / (4 sqrt(n))`), so forward errors stay near machine precision.
pub fn random_well_conditioned(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    let scaled = g.scale_re(1.0 / (4.0 * (n as f64).sqrt()));
    ComplexMatrix::identity(n).add(&scaled).expect("same shape")
}

/// Hermitian positive-definite matrix `G G^H + I`.
pub fn random_hpd(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    g.mat_mul(&g.hermitian())
        .expect("square product")
        .add(&ComplexMatrix::identity(n))
        .expect("same shape")
}
