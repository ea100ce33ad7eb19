//! Minimal dense complex linear-algebra kernel.
//!
//! Everything in the simulator moves through [`ComplexMatrix`]: channels,
//! admittance grids, partitioned network matrices, beamforming weights and
//! signal vectors (as single-column matrices). The kernel provides products,
//! linear solves and inverses in double-precision complex arithmetic with
//! explicit conditioning diagnostics; sparse storage and iterative solvers
//! are out of scope.
//!
//! Solves use LU factorization with partial pivoting. The pivot order is a
//! deterministic function of the input, so repeated runs are bit-for-bit
//! reproducible. A pivot whose magnitude falls below `1e-12` times the
//! largest magnitude of its column (measured on the input matrix) raises
//! [`Error::Singular`] carrying the failing pivot index.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot tolerance for declaring a matrix singular.
pub const SINGULARITY_RTOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for k in 0..self.cols.min(8) {
                let z = self[(i, k)];
                write!(f, "{:+.4}{:+.4}j ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix `c * I`.
    pub fn scaled_identity(n: usize, c: Complex64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c;
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for k in 0..cols {
                data.push(f(i, k));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested row slices of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Build from nested rows of real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Single-column matrix from a slice.
    pub fn column(entries: &[Complex64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    /// Single-column matrix from real entries.
    pub fn real_column(entries: &[f64]) -> Self {
        Self::column(&entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Flat row-major view of the entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Column `k` as a vector of entries.
    pub fn column_entries(&self, k: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, k)]).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, k| self[(k, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, k| self[(k, i)])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn neg(&self) -> Self {
        self.map(|z| -z)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape {
                op,
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: other.rows,
                rhs_cols: other.cols,
            });
        }
        Ok(())
    }

    /// Matrix product `self * rhs`.
    pub fn mat_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                op: "mat_mul",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self[(i, p)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..rhs.cols {
                    out[(i, k)] += a * rhs[(p, k)];
                }
            }
        }
        if !out.all_finite() {
            return Err(Error::NonFinite { op: "mat_mul" });
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when `|A - A^H|` stays within `tol * max(1, |A|)` entrywise.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for k in 0..=i {
                if (self[(i, k)] - self[(k, i)].conj()).norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Copy of the block starting at `(row0, col0)` with the given extent.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, k| self[(row0 + i, col0 + k)])
    }

    /// Assemble `[[a, b], [c, d]]`.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::InvalidParameter(
                "inconsistent block dimensions in block2x2".into(),
            ));
        }
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        Ok(Self::from_fn(rows, cols, |i, k| {
            if i < a.rows {
                if k < a.cols {
                    a[(i, k)]
                } else {
                    b[(i, k - a.cols)]
                }
            } else if k < a.cols {
                c[(i - a.rows, k)]
            } else {
                d[(i - a.rows, k - a.cols)]
            }
        }))
    }

    /// Stack `top` above `bottom`.
    pub fn vstack(top: &Self, bottom: &Self) -> Result<Self> {
        if top.cols != bottom.cols {
            return Err(Error::Shape {
                op: "vstack",
                lhs_rows: top.rows,
                lhs_cols: top.cols,
                rhs_rows: bottom.rows,
                rhs_cols: bottom.cols,
            });
        }
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(Self {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        })
    }

    /// Solve `self * X = rhs` by LU with partial pivoting.
    ///
    /// The pivot order is deterministic; singularity reports the failing
    /// elimination column.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::InvalidParameter(format!(
                "solve requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.rows != rhs.rows {
            return Err(Error::Shape {
                op: "solve",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let lu = LuFactors::factor(self)?;
        let x = lu.solve(rhs);
        if !x.all_finite() {
            return Err(Error::NonFinite { op: "solve" });
        }
        Ok(x)
    }

    /// Matrix inverse, computed as `solve(self, I)`.
    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }

    /// Rough order-of-magnitude condition estimate from the LU diagonal
    /// (`max |u_ii| / min |u_ii|`). Good enough for ill-conditioning
    /// warnings, not for rigorous bounds.
    pub fn condition_estimate(&self) -> Result<f64> {
        let lu = LuFactors::factor(self)?;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..lu.n {
            let d = lu.data[i * lu.n + i].norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Ok(if lo == 0.0 { f64::INFINITY } else { hi / lo })
    }

    /// Cholesky factor of a Hermitian positive-definite matrix, used to
    /// certify positive definiteness.
    pub fn cholesky(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotHermitianPd {
                what: "non-square matrix".into(),
            });
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)].conj();
            }
            if d.re <= 0.0 || !d.re.is_finite() {
                return Err(Error::NotHermitianPd {
                    what: format!("leading minor {}", j + 1),
                });
            }
            let djj = d.re.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// `|a - b|_F / max(|a|_F, |b|_F, floor)`, a symmetric relative distance.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let diff = match self.sub(other) {
            Ok(d) => d.frobenius_norm(),
            Err(_) => return f64::INFINITY,
        };
        let scale = self.frobenius_norm().max(other.frobenius_norm()).max(1e-300);
        diff / scale
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, k): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + k]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, k): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + k]
    }
}

/// LU factorization with partial pivoting of a square matrix.
struct LuFactors {
    n: usize,
    /// Combined L (unit lower, below diagonal) and U (upper) factors.
    data: Vec<Complex64>,
    /// Row permutation: factored row `i` came from input row `perm[i]`.
    perm: Vec<usize>,
}

impl LuFactors {
    fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        // Per-column magnitude of the input, the scale reference for the
        // singularity test.
        let mut col_scale = vec![0.0f64; n];
        for k in 0..n {
            for i in 0..n {
                col_scale[k] = col_scale[k].max(a[(i, k)].norm());
            }
        }
        let mut data = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            // Deterministic pivot choice: strictly larger magnitude wins, so
            // ties keep the lowest row index.
            let mut piv_row = k;
            let mut piv_mag = data[k * n + k].norm();
            for i in (k + 1)..n {
                let mag = data[i * n + k].norm();
                if mag > piv_mag {
                    piv_mag = mag;
                    piv_row = i;
                }
            }
            if piv_mag <= SINGULARITY_RTOL * col_scale[k] {
                return Err(Error::Singular {
                    what: "matrix".into(),
                    pivot_index: k,
                });
            }
            if piv_row != k {
                for c in 0..n {
                    data.swap(k * n + c, piv_row * n + c);
                }
                perm.swap(k, piv_row);
            }
            let pivot = data[k * n + k];
            for i in (k + 1)..n {
                let m = data[i * n + k] / pivot;
                data[i * n + k] = m;
                if m != Complex64::new(0.0, 0.0) {
                    for c in (k + 1)..n {
                        let u = data[k * n + c];
                        data[i * n + c] -= m * u;
                    }
                }
            }
        }
        Ok(Self { n, data, perm })
    }

    fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let m = rhs.cols();
        let mut x = ComplexMatrix::from_fn(n, m, |i, k| rhs[(self.perm[i], k)]);
        // Forward substitution with unit lower factor.
        for i in 1..n {
            for k in 0..i {
                let l = self.data[i * n + k];
                if l != Complex64::new(0.0, 0.0) {
                    for c in 0..m {
                        let y = x[(k, c)];
                        x[(i, c)] -= l * y;
                    }
                }
            }
        }
        // Back substitution.
        for i in (0..n).rev() {
            let d = self.data[i * n + i];
            for k in (i + 1)..n {
                let u = self.data[i * n + k];
                if u != Complex64::new(0.0, 0.0) {
                    for c in 0..m {
                        let y = x[(k, c)];
                        x[(i, c)] -= u * y;
                    }
                }
            }
            for c in 0..m {
                x[(i, c)] /= d;
            }
        }
        x
    }
}
