//! Exact operation-count model for digital versus MiLAC beamforming.
//!
//! Counts are real arithmetic operations per coherence block of `tau`
//! symbols, evaluated as exact rationals (`Ratio<i128>`) so that headline
//! ratios can be checked without rounding noise:
//!
//! * **Zero-forcing** (R-ZFBF/ZFBF transmit, MMSE/ZF receive):
//!   MiLAC `6 n_t n_r`; digital `8 (n_t n_r^2 + n_r^3 / 3) + 8 n_t n_r tau`
//!   (matrix design plus a per-symbol matrix-vector product).
//! * **Matched filtering** (MBF transmit, MF receive): MiLAC `4 n_t n_r`;
//!   digital `8 n_t n_r tau` (no design cost, per-symbol product only).
//! * **DFT**: MiLAC 0 (the grid is fixed offline); digital
//!   `34/9 n_r log2(n_r) tau`.
//! * **Generic estimator configuration**: see [`estimator_counts`].
//! * **Per-symbol product**: digital `8 n_rf n_s` per symbol
//!   (`× tau` per block); MiLAC 0.
//!
//! The Frobenius power normalization used by analog-computed transmit
//! matrices needs a small number of extra digital operations (a norm and
//! one scaling pass over the grid); it is *not* folded into the MiLAC
//! counts above and is reported as a separate line item by
//! [`normalization_note`].

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::estimators::EstimatorTag;

/// Exact operation count.
pub type Count = Ratio<i128>;

/// Which processing task the count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    ZeroForcing,
    MatchedFiltering,
    Dft,
    GenericLmmse,
    PerSymbolProduct,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::ZeroForcing,
        Task::MatchedFiltering,
        Task::Dft,
        Task::GenericLmmse,
        Task::PerSymbolProduct,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Task::ZeroForcing => "zero-forcing",
            Task::MatchedFiltering => "matched-filtering",
            Task::Dft => "dft",
            Task::GenericLmmse => "generic-lmmse",
            Task::PerSymbolProduct => "per-symbol-product",
        }
    }
}

/// Who performs the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Realization {
    Digital,
    Milac,
}

impl Realization {
    pub fn label(self) -> &'static str {
        match self {
            Realization::Digital => "digital",
            Realization::Milac => "milac",
        }
    }
}

/// Dimension tuple for one count query. Unused dimensions may stay `None`;
/// a formula that needs a missing dimension reports a configuration error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityModel {
    pub task: Task,
    pub realization: Realization,
    pub n_t: Option<u64>,
    pub n_r: Option<u64>,
    pub n_rf: Option<u64>,
    pub n_s: Option<u64>,
    pub tau: Option<u64>,
}

impl ComplexityModel {
    /// Square-system shorthand (`n_t = n_r = n`).
    pub fn square(task: Task, realization: Realization, n: u64, tau: u64) -> Self {
        Self {
            task,
            realization,
            n_t: Some(n),
            n_r: Some(n),
            n_rf: None,
            n_s: None,
            tau: Some(tau),
        }
    }

    fn need(&self, value: Option<u64>, name: &str) -> Result<Count> {
        let v = value.ok_or_else(|| {
            Error::Config(format!(
                "{}/{} needs dimension {name}",
                self.task.label(),
                self.realization.label()
            ))
        })?;
        Ok(Count::from_integer(v as i128))
    }
}

fn int(v: i128) -> Count {
    Count::from_integer(v)
}

/// Exact per-coherence-block count as a rational.
pub fn ops_exact(model: &ComplexityModel) -> Result<Count> {
    match (model.task, model.realization) {
        (Task::ZeroForcing, Realization::Milac) => {
            let nt = model.need(model.n_t, "n_t")?;
            let nr = model.need(model.n_r, "n_r")?;
            Ok(int(6) * nt * nr)
        }
        (Task::ZeroForcing, Realization::Digital) => {
            let nt = model.need(model.n_t, "n_t")?;
            let nr = model.need(model.n_r, "n_r")?;
            let tau = model.need(model.tau, "tau")?;
            let design = int(8) * (nt * nr * nr + nr * nr * nr / int(3));
            let per_symbol = int(8) * nt * nr * tau;
            Ok(design + per_symbol)
        }
        (Task::MatchedFiltering, Realization::Milac) => {
            let nt = model.need(model.n_t, "n_t")?;
            let nr = model.need(model.n_r, "n_r")?;
            Ok(int(4) * nt * nr)
        }
        (Task::MatchedFiltering, Realization::Digital) => {
            let nt = model.need(model.n_t, "n_t")?;
            let nr = model.need(model.n_r, "n_r")?;
            let tau = model.need(model.tau, "tau")?;
            Ok(int(8) * nt * nr * tau)
        }
        (Task::Dft, Realization::Milac) => Ok(int(0)),
        (Task::Dft, Realization::Digital) => {
            let nr_raw = model.n_r.ok_or_else(|| Error::Config("dft/digital needs dimension n_r".into()))?;
            if !nr_raw.is_power_of_two() {
                return Err(Error::Config(format!(
                    "dft count needs a power-of-two size, got {nr_raw}"
                )));
            }
            let nr = int(nr_raw as i128);
            let log2 = int(nr_raw.trailing_zeros() as i128);
            let tau = model.need(model.tau, "tau")?;
            Ok(Count::new(34, 9) * nr * log2 * tau)
        }
        (Task::GenericLmmse, Realization::Milac) => {
            let nt = model.need(model.n_t, "n_t")?;
            let nr = model.need(model.n_r, "n_r")?;
            let (milac, _) = estimator_counts_rational(EstimatorTag::Lmmse, nt, nr);
            Ok(milac)
        }
        (Task::GenericLmmse, Realization::Digital) => {
            let nt = model.need(model.n_t, "n_t")?;
            let nr = model.need(model.n_r, "n_r")?;
            let (_, digital) = estimator_counts_rational(EstimatorTag::Lmmse, nt, nr);
            Ok(digital)
        }
        (Task::PerSymbolProduct, Realization::Milac) => Ok(int(0)),
        (Task::PerSymbolProduct, Realization::Digital) => {
            let n_rf = model.need(model.n_rf, "n_rf")?;
            let n_s = model.need(model.n_s, "n_s")?;
            let tau = model.need(model.tau, "tau")?;
            Ok(int(8) * n_rf * n_s * tau)
        }
    }
}

/// Per-coherence-block count rounded to the nearest integer (only the DFT
/// count is fractional before rounding).
pub fn ops_per_block(model: &ComplexityModel) -> Result<i128> {
    Ok(ops_exact(model)?.round().to_integer())
}

/// Digital-over-MiLAC complexity ratio for a square system, as an exact
/// rational. Only defined for tasks with a nonzero MiLAC count; the DFT
/// reports its absolute saving instead (its digital count).
pub fn gain(task: Task, n: u64, tau: u64) -> Result<Count> {
    let digital = ops_exact(&ComplexityModel::square(task, Realization::Digital, n, tau))?;
    let milac = ops_exact(&ComplexityModel::square(task, Realization::Milac, n, tau))?;
    if milac == int(0) {
        return Err(Error::Config(format!(
            "{} has a zero MiLAC count; report the absolute saving instead",
            task.label()
        )));
    }
    Ok(digital / milac)
}

fn estimator_counts_rational(tag: EstimatorTag, x: Count, y: Count) -> (Count, Count) {
    let milac = match tag {
        EstimatorTag::Lmmse | EstimatorTag::Gls | EstimatorTag::Rls | EstimatorTag::Ols => {
            int(6) * x * y
        }
        EstimatorTag::Gmf | EstimatorTag::Omf => int(4) * x * y,
    };
    let digital = match tag {
        EstimatorTag::Lmmse | EstimatorTag::Gls => {
            int(8) * (x * y * y + x * x * y + (x * x * x).min(y * y * y) / int(3))
        }
        EstimatorTag::Rls | EstimatorTag::Ols => {
            let a = x * x * y + x * x * x / int(3);
            let b = x * y * y + y * y * y / int(3);
            int(8) * a.min(b)
        }
        EstimatorTag::Gmf => int(8) * (x * x + x * y + y * y),
        EstimatorTag::Omf => int(8) * x * y,
    };
    (milac, digital)
}

/// `(milac, digital)` per-coherence-block configuration counts for an
/// X-unknown, Y-observation estimator.
pub fn estimator_counts(tag: EstimatorTag, x: u64, y: u64) -> (Count, Count) {
    estimator_counts_rational(tag, int(x as i128), int(y as i128))
}

/// Round to two significant figures, the precision used for headline
/// complexity ratios.
pub fn round_sig2(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exponent = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(exponent - 1);
    (x / scale).round() * scale
}

/// Digital operations needed for the Frobenius normalization of an analog
/// transmit matrix of the given shape: one squared norm over the grid plus
/// one real scaling of the synthesized components. Reported separately,
/// never folded into the MiLAC configuration counts.
pub fn normalization_note(n_t: u64, n_r: u64) -> Count {
    // |F|_F^2: 2 ops per complex entry; rescale: 2 ops per complex entry.
    int(4) * int(n_t as i128) * int(n_r as i128)
}

/// One CSV row of the complexity report.
#[derive(Debug, Clone)]
pub struct ComplexityRow {
    pub task: Task,
    pub realization: Realization,
    pub n_t: u64,
    pub n_r: u64,
    pub tau: u64,
    pub ops: Count,
    /// Digital/MiLAC ratio, carried on digital rows when defined.
    pub gain: Option<Count>,
}

fn ratio_to_f64(c: &Count) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

/// Format an exact rational as `num` or `num/den`.
pub fn ratio_string(c: &Count) -> String {
    if c.denom() == &1 {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Sweep the count model over square sizes for the given tasks.
pub fn sweep_square(tasks: &[Task], sizes: &[u64], tau: u64) -> Result<Vec<ComplexityRow>> {
    let mut rows = Vec::new();
    for &task in tasks {
        for &n in sizes {
            let milac = ops_exact(&ComplexityModel::square(task, Realization::Milac, n, tau))?;
            let digital = ops_exact(&ComplexityModel::square(task, Realization::Digital, n, tau))?;
            let gain_ratio = if milac == int(0) { None } else { Some(digital.clone() / milac.clone()) };
            rows.push(ComplexityRow {
                task,
                realization: Realization::Digital,
                n_t: n,
                n_r: n,
                tau,
                ops: digital,
                gain: gain_ratio,
            });
            rows.push(ComplexityRow {
                task,
                realization: Realization::Milac,
                n_t: n,
                n_r: n,
                tau,
                ops: milac,
                gain: None,
            });
        }
    }
    Ok(rows)
}

/// Render rows in the fixed CSV schema
/// `task,realization,n_t,n_r,tau,ops_exact,ops_sci,gain`.
pub fn rows_to_csv(rows: &[ComplexityRow]) -> String {
    let mut out = String::from("task,realization,n_t,n_r,tau,ops_exact,ops_sci,gain\n");
    for row in rows {
        let ops_f = ratio_to_f64(&row.ops);
        let gain_s = row.gain.as_ref().map(|g| format!("{}", ratio_to_f64(g))).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.3e},{}\n",
            row.task.label(),
            row.realization.label(),
            row.n_t,
            row.n_r,
            row.tau,
            ratio_string(&row.ops),
            ops_f,
            gain_s
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn milac_zero_forcing_small() {
        let m = ComplexityModel::square(Task::ZeroForcing, Realization::Milac, 4, 100);
        assert_eq!(ops_per_block(&m).unwrap(), 96);
    }

    #[test]
    fn matched_filter_headline() {
        let d = ComplexityModel::square(Task::MatchedFiltering, Realization::Digital, 8192, 100);
        assert_eq!(ops_per_block(&d).unwrap(), 53_687_091_200);
        let m = ComplexityModel::square(Task::MatchedFiltering, Realization::Milac, 8192, 100);
        assert_eq!(ops_per_block(&m).unwrap(), 268_435_456);
        assert_eq!(gain(Task::MatchedFiltering, 8192, 100).unwrap(), int(200));
    }

    #[test]
    fn mf_gain_is_two_tau_for_any_size() {
        for n in [1u64, 4, 64, 8192] {
            assert_eq!(gain(Task::MatchedFiltering, n, 100).unwrap(), int(200), "n = {n}");
        }
    }

    #[test]
    fn dft_headline_saving() {
        let d = ComplexityModel::square(Task::Dft, Realization::Digital, 8192, 100);
        // 34/9 * 8192 * 13 * 100, rounded.
        assert_eq!(ops_exact(&d).unwrap(), Count::new(34 * 8192 * 13 * 100, 9));
        assert_eq!(ops_per_block(&d).unwrap(), 40_231_822);
        assert_eq!(round_sig2(ops_per_block(&d).unwrap() as f64), 4.0e7);
        let m = ComplexityModel::square(Task::Dft, Realization::Milac, 8192, 100);
        assert_eq!(ops_per_block(&m).unwrap(), 0);
        assert!(gain(Task::Dft, 8192, 100).is_err());
    }

    #[test]
    fn zf_gain_headline() {
        let g = gain(Task::ZeroForcing, 8192, 100).unwrap();
        let g_f = *g.numer() as f64 / *g.denom() as f64;
        assert!((g_f - 14696.888).abs() < 1e-2, "gain = {g_f}");
        assert_eq!(round_sig2(g_f), 1.5e4);
    }

    #[test]
    fn zf_gain_smallest_case_pins_formula_shape() {
        // n = tau = 1: (8 * 4/3 + 8) / 6 = 28/9.
        assert_eq!(gain(Task::ZeroForcing, 1, 1).unwrap(), Count::new(28, 9));
    }

    #[test]
    fn milac_zf_scales_quadratically() {
        for n in [1u64, 2, 4, 8, 64, 512, 4096] {
            let a = ops_exact(&ComplexityModel::square(Task::ZeroForcing, Realization::Milac, n, 1)).unwrap();
            let b =
                ops_exact(&ComplexityModel::square(Task::ZeroForcing, Realization::Milac, 2 * n, 1)).unwrap();
            assert_eq!(b / a, int(4));
        }
    }

    #[test]
    fn digital_zf_approaches_cubic_constant() {
        // design + per-symbol cost over n^3 tends to 32/3 with tau fixed.
        let tau = 100u64;
        let mut prev_err = f64::INFINITY;
        for exp in 6..=13u32 {
            let n = 1u64 << exp;
            let ops = ops_exact(&ComplexityModel::square(Task::ZeroForcing, Realization::Digital, n, tau))
                .unwrap();
            let ops_f = *ops.numer() as f64 / *ops.denom() as f64;
            let err = (ops_f / (n as f64).powi(3) - 32.0 / 3.0).abs();
            assert!(err < prev_err, "ratio not converging at n = {n}");
            prev_err = err;
        }
        assert!(prev_err < 0.1);
    }

    #[test]
    fn estimator_count_examples() {
        let (m, d) = estimator_counts(EstimatorTag::Omf, 4, 4);
        assert_eq!(m, int(64));
        assert_eq!(d, int(128));

        let (m, d) = estimator_counts(EstimatorTag::Lmmse, 2, 2);
        assert_eq!(m, int(24));
        assert_eq!(d, Count::new(448, 3));

        let (_, d) = estimator_counts(EstimatorTag::Rls, 4, 8);
        // 8 * min(128 + 64/3, 256 + 512/3)
        assert_eq!(d, int(8) * (int(128) + Count::new(64, 3)));

        let (m, _) = estimator_counts(EstimatorTag::Gmf, 3, 5);
        assert_eq!(m, int(60));
        let (_, d) = estimator_counts(EstimatorTag::Gmf, 3, 5);
        assert_eq!(d, int(8 * (9 + 15 + 25)));
    }

    #[test]
    fn missing_dimension_is_config_error() {
        let m = ComplexityModel {
            task: Task::ZeroForcing,
            realization: Realization::Digital,
            n_t: Some(4),
            n_r: Some(4),
            n_rf: None,
            n_s: None,
            tau: None,
        };
        assert!(matches!(ops_exact(&m), Err(Error::Config(_))));

        let m = ComplexityModel {
            task: Task::PerSymbolProduct,
            realization: Realization::Digital,
            n_t: None,
            n_r: None,
            n_rf: Some(16),
            n_s: Some(4),
            tau: Some(10),
        };
        assert_eq!(ops_per_block(&m).unwrap(), 8 * 16 * 4 * 10);
    }

    #[test]
    fn dft_requires_power_of_two() {
        let m = ComplexityModel::square(Task::Dft, Realization::Digital, 12, 100);
        assert!(matches!(ops_exact(&m), Err(Error::Config(_))));
    }

    #[test]
    fn round_sig2_examples() {
        assert_eq!(round_sig2(14696.9), 15000.0);
        assert_eq!(round_sig2(200.0), 200.0);
        assert_eq!(round_sig2(40231822.0), 4.0e7);
        assert_eq!(round_sig2(0.0), 0.0);
        assert!((round_sig2(-3.26e-4) - -3.3e-4).abs() < 1e-12);
    }

    #[test]
    fn csv_schema() {
        let rows = sweep_square(&[Task::MatchedFiltering], &[4], 10).unwrap();
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "task,realization,n_t,n_r,tau,ops_exact,ops_sci,gain"
        );
        let digital = lines.next().unwrap();
        assert!(digital.starts_with("matched-filtering,digital,4,4,10,1280,"));
        assert!(digital.ends_with(",20")); // gain 2 tau = 20
        let milac = lines.next().unwrap();
        assert!(milac.starts_with("matched-filtering,milac,4,4,10,64,"));
        assert!(milac.ends_with(','));
    }
}
