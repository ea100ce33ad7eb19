//! Radix-2 FFT used as an independent check on DFT-computing networks.
//!
//! Unnormalized forward transform `X[k] = sum_n x[n] exp(-j 2 pi n k / N)`;
//! callers apply the `1/sqrt(N)` unitary scaling themselves. Kept separate
//! from the network synthesis code on purpose so it can serve as an oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// In-place iterative radix-2 decimation-in-time FFT. The length must be a
/// power of two (length 1 is a no-op).
pub fn fft_radix2(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = input.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "radix-2 FFT needs a power-of-two length, got {n}"
        )));
    }
    let mut x = input.to_vec();
    if n == 1 {
        return Ok(x);
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = (i.reverse_bits() >> (usize::BITS - bits)) & (n - 1);
        if j > i {
            x.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let w_len = Complex64::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let a = x[start + k];
                let b = x[start + k + len / 2] * w;
                x[start + k] = a + b;
                x[start + k + len / 2] = a - b;
                w *= w_len;
            }
        }
        len <<= 1;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(fft_radix2(&[c(1.0, 0.0); 3]).is_err());
        assert!(fft_radix2(&[]).is_err());
    }

    #[test]
    fn length_one_is_identity() {
        let out = fft_radix2(&[c(2.0, -1.0)]).unwrap();
        assert_eq!(out, vec![c(2.0, -1.0)]);
    }

    #[test]
    fn matches_direct_sum() {
        let x: Vec<Complex64> = (0..16)
            .map(|i| c((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let fast = fft_radix2(&x).unwrap();
        for k in 0..16 {
            let mut direct = c(0.0, 0.0);
            for (n, &xn) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (n as f64) * (k as f64) / 16.0;
                direct += xn * c(ang.cos(), ang.sin());
            }
            assert!((fast[k] - direct).norm() < 1e-12);
        }
    }
}
