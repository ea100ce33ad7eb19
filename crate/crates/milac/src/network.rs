//! The MiLAC physical model.
//!
//! A MiLAC is a P-port reconfigurable microwave network built from P²
//! tunable admittance components: `Y[k][k]` connects port `k` to ground and
//! `Y[i][k]` (for `i != k`) connects port `i` to port `k`. Sources drive the
//! first N ports through the reference admittance `y0`; the remaining M
//! ports are terminated into matched loads. Under that termination the port
//! voltages `v` obey the algebraic contract
//!
//! ```text
//! P v = [u; 0],   P = Y/y0 + I
//! ```
//!
//! where `Y` is the network admittance matrix assembled from the component
//! grid. [`MilacNetwork::simulate_nodal`] solves this system directly and
//! serves as the circuit-level oracle. [`simulate_blockwise`] evaluates the
//! closed-form block solutions instead; the two must agree whenever both are
//! defined, which the test suites exploit.
//!
//! The component grid is not assumed reciprocal: `Y[i][k]` and `Y[k][i]`
//! are independent tunables, and synthesis from a target `P` matrix can
//! produce non-reciprocal grids (the DFT network does).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Condition estimate above which simulation logs an ill-conditioning
/// warning (still attempting the solve).
pub const CONDITION_WARN_THRESHOLD: f64 = 1e10;

/// A P-port MiLAC: port split, reference admittance and the full grid of
/// tunable admittance components (siemens).
#[derive(Debug, Clone, PartialEq)]
pub struct MilacNetwork {
    n_in: usize,
    m_out: usize,
    y0: f64,
    /// P×P grid; entry (i, k) is the component between ports i and k, or
    /// port k and ground when i == k.
    components: ComplexMatrix,
}

/// The network matrix `P = Y/y0 + I`, partitioned at the input/output port
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedP {
    pub p11: ComplexMatrix,
    pub p12: ComplexMatrix,
    pub p21: ComplexMatrix,
    pub p22: ComplexMatrix,
}

/// Which closed-form block solution to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockVariant {
    /// Requires `p11` and the complement `p21 p11^-1 p12 - p22` invertible.
    ViaP11,
    /// Requires `p22` and the complement `p12 p22^-1 p21 - p11` invertible.
    ViaP22,
}

/// Port voltages from a simulation: `v_in` on the N driven ports, `v_out`
/// on the M undriven ports.
#[derive(Debug, Clone)]
pub struct NodalSolution {
    pub v_in: ComplexMatrix,
    pub v_out: ComplexMatrix,
}

impl MilacNetwork {
    /// Build a network from its component grid.
    pub fn new(n_in: usize, m_out: usize, y0: f64, components: ComplexMatrix) -> Result<Self> {
        if n_in == 0 {
            return Err(Error::InvalidParameter("network needs at least one input port".into()));
        }
        if m_out == 0 {
            return Err(Error::InvalidParameter("network needs at least one output port".into()));
        }
        let ports = n_in + m_out;
        if components.rows() != ports || components.cols() != ports {
            return Err(Error::InvalidParameter(format!(
                "component grid must be {ports}x{ports}, got {}x{}",
                components.rows(),
                components.cols()
            )));
        }
        if !(y0.is_finite() && y0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reference admittance must be finite and positive, got {y0}"
            )));
        }
        if !components.all_finite() {
            return Err(Error::InvalidParameter("component grid contains non-finite values".into()));
        }
        Ok(Self { n_in, m_out, y0, components })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    /// Total port count P = N + M.
    pub fn ports(&self) -> usize {
        self.n_in + self.m_out
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    /// Component between ports `i` and `k` (0-based), or to ground for
    /// `i == k`.
    pub fn component(&self, i: usize, k: usize) -> Complex64 {
        self.components[(i, k)]
    }

    pub fn components(&self) -> &ComplexMatrix {
        &self.components
    }

    /// Assemble the admittance matrix from the component grid:
    /// off-diagonal entries are `-Y[i][k]`, diagonal entries are the column
    /// sums of the components.
    pub fn admittance_matrix(&self) -> ComplexMatrix {
        let p = self.ports();
        let mut y = ComplexMatrix::zeros(p, p);
        for k in 0..p {
            let mut col_sum = Complex64::new(0.0, 0.0);
            for i in 0..p {
                col_sum += self.components[(i, k)];
                if i != k {
                    y[(i, k)] = -self.components[(i, k)];
                }
            }
            y[(k, k)] = col_sum;
        }
        y
    }

    /// `P = Y/y0 + I`, partitioned at the input/output boundary.
    pub fn p_matrix(&self) -> PartitionedP {
        let p = self.ports();
        let mut full = self.admittance_matrix().scale_re(1.0 / self.y0);
        for i in 0..p {
            full[(i, i)] += 1.0;
        }
        PartitionedP::from_full(&full, self.n_in).expect("dimensions are consistent by construction")
    }

    /// Synthesize the component grid that realizes a target `P` matrix:
    /// `Y[i][k] = -y0 P[i][k]` off the diagonal and
    /// `Y[k][k] = y0 (sum of column k of P) - y0` on it. The resulting
    /// network reproduces `p` exactly (up to rounding) through
    /// [`MilacNetwork::p_matrix`].
    pub fn from_p(p: &PartitionedP, y0: f64) -> Result<Self> {
        let full = p.assemble()?;
        let n = p.n();
        let m = p.m();
        let ports = n + m;
        let mut grid = ComplexMatrix::zeros(ports, ports);
        for k in 0..ports {
            let mut col_sum = Complex64::new(0.0, 0.0);
            for i in 0..ports {
                col_sum += full[(i, k)];
                if i != k {
                    grid[(i, k)] = -full[(i, k)] * y0;
                }
            }
            grid[(k, k)] = (col_sum - 1.0) * y0;
        }
        Self::new(n, m, y0, grid)
    }

    /// Circuit-level simulation: solve `P v = [u; 0]` for all port voltages.
    ///
    /// This is the analog oracle — it factors the full P matrix and uses no
    /// block formulas. An ill-conditioned but invertible P logs a warning
    /// and proceeds; a singular P is an error (the network is physically
    /// ill-posed).
    pub fn simulate_nodal(&self, u: &ComplexMatrix) -> Result<NodalSolution> {
        if u.rows() != self.n_in || u.cols() != 1 {
            return Err(Error::InvalidParameter(format!(
                "input must be {}x1, got {}x{}",
                self.n_in,
                u.rows(),
                u.cols()
            )));
        }
        let v = self.solve_full(u)?;
        Ok(NodalSolution {
            v_in: v.block(0, 0, self.n_in, 1),
            v_out: v.block(self.n_in, 0, self.m_out, 1),
        })
    }

    /// Network response as a matrix: column k holds `v_out` for the k-th
    /// unit input. Equivalent to `m_out x n_in` runs of
    /// [`MilacNetwork::simulate_nodal`] over the standard basis.
    pub fn effective_output_matrix(&self) -> Result<ComplexMatrix> {
        let v = self.solve_full(&ComplexMatrix::identity(self.n_in))?;
        Ok(v.block(self.n_in, 0, self.m_out, self.n_in))
    }

    fn solve_full(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        let full = self.p_matrix().assemble()?;
        if let Ok(cond) = full.condition_estimate() {
            if cond > CONDITION_WARN_THRESHOLD {
                log::warn!(
                    "P matrix condition estimate {cond:.3e} exceeds {CONDITION_WARN_THRESHOLD:.0e}; results may lose precision"
                );
            }
        }
        let rhs = ComplexMatrix::vstack(u, &ComplexMatrix::zeros(self.m_out, u.cols()))?;
        full.solve(&rhs).map_err(|e| e.named("P"))
    }

    /// Canonical plain-text serialization:
    /// a header `MILAC v1 N M y0` followed by P² lines `i k re im`
    /// (1-based port indices, row-major order). Finite values round-trip
    /// bit-exactly.
    pub fn to_text(&self) -> String {
        let p = self.ports();
        let mut out = String::new();
        out.push_str(&format!("MILAC v1 {} {} {}\n", self.n_in, self.m_out, self.y0));
        for i in 0..p {
            for k in 0..p {
                let z = self.components[(i, k)];
                out.push_str(&format!("{} {} {} {}\n", i + 1, k + 1, z.re, z.im));
            }
        }
        out
    }

    /// Parse the text format produced by [`MilacNetwork::to_text`].
    /// Component lines may appear in any order but each grid entry must
    /// appear exactly once.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::NetworkFormat("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "MILAC" || fields[1] != "v1" {
            return Err(Error::NetworkFormat(format!("bad header line: {header:?}")));
        }
        let n_in: usize = fields[2]
            .parse()
            .map_err(|_| Error::NetworkFormat(format!("bad N in header: {:?}", fields[2])))?;
        let m_out: usize = fields[3]
            .parse()
            .map_err(|_| Error::NetworkFormat(format!("bad M in header: {:?}", fields[3])))?;
        let y0: f64 = fields[4]
            .parse()
            .map_err(|_| Error::NetworkFormat(format!("bad y0 in header: {:?}", fields[4])))?;
        let ports = n_in + m_out;
        let mut grid = ComplexMatrix::zeros(ports, ports);
        let mut seen = vec![false; ports * ports];
        let mut count = 0usize;
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::NetworkFormat(format!(
                    "line {}: expected `i k re im`, got {line:?}",
                    lineno + 2
                )));
            }
            let i: usize = f[0]
                .parse()
                .map_err(|_| Error::NetworkFormat(format!("line {}: bad port index", lineno + 2)))?;
            let k: usize = f[1]
                .parse()
                .map_err(|_| Error::NetworkFormat(format!("line {}: bad port index", lineno + 2)))?;
            if i == 0 || k == 0 || i > ports || k > ports {
                return Err(Error::NetworkFormat(format!(
                    "line {}: port index out of range 1..={ports}",
                    lineno + 2
                )));
            }
            let re: f64 = f[2]
                .parse()
                .map_err(|_| Error::NetworkFormat(format!("line {}: bad real part", lineno + 2)))?;
            let im: f64 = f[3]
                .parse()
                .map_err(|_| Error::NetworkFormat(format!("line {}: bad imaginary part", lineno + 2)))?;
            let idx = (i - 1) * ports + (k - 1);
            if seen[idx] {
                return Err(Error::NetworkFormat(format!(
                    "line {}: duplicate component ({i}, {k})",
                    lineno + 2
                )));
            }
            seen[idx] = true;
            count += 1;
            grid[(i - 1, k - 1)] = Complex64::new(re, im);
        }
        if count != ports * ports {
            return Err(Error::NetworkFormat(format!(
                "expected {} component lines, got {count}",
                ports * ports
            )));
        }
        Self::new(n_in, m_out, y0, grid)
    }
}

impl PartitionedP {
    pub fn new(
        p11: ComplexMatrix,
        p12: ComplexMatrix,
        p21: ComplexMatrix,
        p22: ComplexMatrix,
    ) -> Result<Self> {
        let n = p11.rows();
        let m = p22.rows();
        let consistent = p11.cols() == n
            && p22.cols() == m
            && p12.rows() == n
            && p12.cols() == m
            && p21.rows() == m
            && p21.cols() == n;
        if !consistent {
            return Err(Error::InvalidParameter(
                "block dimensions do not form a square partitioned matrix".into(),
            ));
        }
        Ok(Self { p11, p12, p21, p22 })
    }

    /// Partition a full square matrix at row/column `n`.
    pub fn from_full(full: &ComplexMatrix, n: usize) -> Result<Self> {
        if !full.is_square() || n == 0 || n >= full.rows() {
            return Err(Error::InvalidParameter(format!(
                "cannot partition a {}x{} matrix at {n}",
                full.rows(),
                full.cols()
            )));
        }
        let m = full.rows() - n;
        Ok(Self {
            p11: full.block(0, 0, n, n),
            p12: full.block(0, n, n, m),
            p21: full.block(n, 0, m, n),
            p22: full.block(n, n, m, m),
        })
    }

    /// Input-port block order N.
    pub fn n(&self) -> usize {
        self.p11.rows()
    }

    /// Output-port block order M.
    pub fn m(&self) -> usize {
        self.p22.rows()
    }

    /// Reassemble the full (N+M)×(N+M) matrix.
    pub fn assemble(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::block2x2(&self.p11, &self.p12, &self.p21, &self.p22)
    }
}

/// Closed-form block solution of `P v = [u; 0]`, exactly as the two
/// textbook variants write it:
///
/// * `ViaP11`:
///   `v2 = (P21 P11^-1 P12 - P22)^-1 P21 P11^-1 u` and
///   `v1 = (P11^-1 - P11^-1 P12 (P21 P11^-1 P12 - P22)^-1 P21 P11^-1) u`;
/// * `ViaP22`:
///   `v1 = -(P12 P22^-1 P21 - P11)^-1 u` and
///   `v2 = P22^-1 P21 (P12 P22^-1 P21 - P11)^-1 u`.
///
/// Both variants agree with each other and with the nodal solve whenever
/// the designated blocks are invertible. Singularity errors name the block
/// or the complement that failed.
pub fn simulate_blockwise(
    p: &PartitionedP,
    u: &ComplexMatrix,
    variant: BlockVariant,
) -> Result<NodalSolution> {
    if u.rows() != p.n() || u.cols() != 1 {
        return Err(Error::InvalidParameter(format!(
            "input must be {}x1, got {}x{}",
            p.n(),
            u.rows(),
            u.cols()
        )));
    }
    match variant {
        BlockVariant::ViaP11 => {
            let rhs = ComplexMatrix::from_fn(p.n(), p.m() + 1, |i, k| {
                if k < p.m() {
                    p.p12[(i, k)]
                } else {
                    u[(i, 0)]
                }
            });
            let sol = p.p11.solve(&rhs).map_err(|e| e.named("P11"))?;
            let p11inv_p12 = sol.block(0, 0, p.n(), p.m());
            let p11inv_u = sol.block(0, p.m(), p.n(), 1);
            let complement = p.p21.mat_mul(&p11inv_p12)?.sub(&p.p22)?;
            let t = p.p21.mat_mul(&p11inv_u)?;
            let v2 = complement
                .solve(&t)
                .map_err(|e| e.named("P21 P11^-1 P12 - P22"))?;
            let v1 = p11inv_u.sub(&p11inv_p12.mat_mul(&v2)?)?;
            Ok(NodalSolution { v_in: v1, v_out: v2 })
        }
        BlockVariant::ViaP22 => {
            let p22inv_p21 = p.p22.solve(&p.p21).map_err(|e| e.named("P22"))?;
            let complement = p.p12.mat_mul(&p22inv_p21)?.sub(&p.p11)?;
            let v1 = complement
                .solve(u)
                .map_err(|e| e.named("P12 P22^-1 P21 - P11"))?
                .neg();
            let v2 = p22inv_p21.mat_mul(&v1)?.neg();
            Ok(NodalSolution { v_in: v1, v_out: v2 })
        }
    }
}
