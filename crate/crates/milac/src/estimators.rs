//! Linear MMSE estimation for the observation model `y = H x + n` and its
//! five special cases, with the network builders that make a MiLAC compute
//! each one.
//!
//! The estimator of `x` from `y` exists in two algebraically equivalent
//! closed forms,
//!
//! ```text
//! x1 = (H^H Cn^-1 H + Cx^-1)^-1 H^H Cn^-1 y
//! x2 = Cx H^H (H Cx H^H + Cn)^-1 y
//! ```
//!
//! and specializes under covariance assumptions to generalized least
//! squares (GLS), generalized matched filtering (GMF), regularized least
//! squares (RLS, ridge regression), ordinary least squares (OLS) and
//! ordinary matched filtering (OMF). Each case maps onto a MiLAC with
//! `N = Y` input ports and `M = X` output ports whose partitioned P matrix
//! is one of two tabulated block layouts: one with `P11` invertible
//! ([`EstimatorForm::Form1`]) and one with `P22` invertible
//! ([`EstimatorForm::Form2`]). Feeding `y` into the configured network
//! returns the estimate on the output ports, which
//! [`estimate_analog`] cross-checks against [`estimate_digital`].
//!
//! The diagonal blocks of every layout carry a free overall sign
//! ([`SignBranch`]); both branches compute the same estimate, and the
//! default elsewhere in the crate is [`SignBranch::Upper`] so serialized
//! networks are reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{MilacNetwork, PartitionedP};
use crate::numerics::ComplexMatrix;

/// Which member of the LMMSE family to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorTag {
    Lmmse,
    Gls,
    Gmf,
    Rls,
    Ols,
    Omf,
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 6] = [
        EstimatorTag::Lmmse,
        EstimatorTag::Gls,
        EstimatorTag::Gmf,
        EstimatorTag::Rls,
        EstimatorTag::Ols,
        EstimatorTag::Omf,
    ];

    /// True for the kinds whose closed form uses the scalar regularizer
    /// instead of the covariance matrices.
    pub fn uses_lambda(self) -> bool {
        matches!(self, EstimatorTag::Rls | EstimatorTag::Omf)
    }
}

/// Which closed form / table layout to use.
///
/// `Form1` variants invert an X×X Gram-style matrix and pair with the
/// `P11`-invertible network layout; `Form2` variants invert a Y×Y matrix
/// and pair with the `P22`-invertible layout. For GLS and OLS only the form
/// matching the shape of `H` exists (`Form1` needs `Y >= X`, `Form2` needs
/// `Y <= X`); selection is always explicit, never inferred from dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorForm {
    Form1,
    Form2,
}

/// Estimator selector: family member plus closed-form variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EstimatorKind {
    pub tag: EstimatorTag,
    pub form: EstimatorForm,
}

impl EstimatorKind {
    pub fn new(tag: EstimatorTag, form: EstimatorForm) -> Self {
        Self { tag, form }
    }
}

/// Sign branch of the tabulated network layouts: `Upper` takes the upper
/// symbol of each `±` / `∓` pair, `Lower` the lower one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignBranch {
    Upper,
    Lower,
}

impl SignBranch {
    fn plus(self) -> f64 {
        match self {
            SignBranch::Upper => 1.0,
            SignBranch::Lower => -1.0,
        }
    }
}

/// Linear observation `y = H x + n` with zero-mean `x` and `n`,
/// covariances `c_x` (X×X) and `c_n` (Y×Y), and the scalar regularizer
/// `lambda` used by the identity-covariance special cases.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    h: ComplexMatrix,
    c_x: ComplexMatrix,
    c_n: ComplexMatrix,
    lambda: f64,
}

impl ObservationModel {
    /// Validates that both covariances are Hermitian (within `1e-12`
    /// relative) and positive definite (certified by Cholesky).
    pub fn new(h: ComplexMatrix, c_x: ComplexMatrix, c_n: ComplexMatrix, lambda: f64) -> Result<Self> {
        if c_x.rows() != h.cols() || c_n.rows() != h.rows() {
            return Err(Error::InvalidParameter(format!(
                "covariance sizes ({}x{}, {}x{}) do not match H ({}x{})",
                c_x.rows(),
                c_x.cols(),
                c_n.rows(),
                c_n.cols(),
                h.rows(),
                h.cols()
            )));
        }
        for (name, m) in [("c_x", &c_x), ("c_n", &c_n)] {
            if !m.is_hermitian(1e-12) {
                return Err(Error::NotHermitianPd { what: name.into() });
            }
            m.cholesky().map_err(|_| Error::NotHermitianPd { what: name.into() })?;
        }
        Ok(Self { h, c_x, c_n, lambda })
    }

    /// Model with identity covariances, for the RLS/OLS/OMF cases where
    /// only `H` and `lambda` matter.
    pub fn with_identity_covariances(h: ComplexMatrix, lambda: f64) -> Result<Self> {
        let c_x = ComplexMatrix::identity(h.cols());
        let c_n = ComplexMatrix::identity(h.rows());
        Self::new(h, c_x, c_n, lambda)
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn c_x(&self) -> &ComplexMatrix {
        &self.c_x
    }

    pub fn c_n(&self) -> &ComplexMatrix {
        &self.c_n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Unknown dimension X.
    pub fn x_dim(&self) -> usize {
        self.h.cols()
    }

    /// Observation dimension Y.
    pub fn y_dim(&self) -> usize {
        self.h.rows()
    }

    fn require_lambda(&self) -> Result<f64> {
        if self.lambda > 0.0 && self.lambda.is_finite() {
            Ok(self.lambda)
        } else {
            Err(Error::InvalidParameter(format!(
                "this estimator needs a positive regularizer, got lambda = {}",
                self.lambda
            )))
        }
    }

    fn check_form_dims(&self, kind: EstimatorKind) -> Result<()> {
        let (x, y) = (self.x_dim(), self.y_dim());
        match (kind.tag, kind.form) {
            (EstimatorTag::Gls | EstimatorTag::Ols, EstimatorForm::Form1) if y < x => {
                Err(Error::InvalidParameter(format!(
                    "{:?} Form1 needs Y >= X, got X = {x}, Y = {y}",
                    kind.tag
                )))
            }
            (EstimatorTag::Gls | EstimatorTag::Ols, EstimatorForm::Form2) if y > x => {
                Err(Error::InvalidParameter(format!(
                    "{:?} Form2 needs Y <= X, got X = {x}, Y = {y}",
                    kind.tag
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Closed-form digital estimate of `x` from the observation `y`.
pub fn estimate_digital(
    model: &ObservationModel,
    kind: EstimatorKind,
    y: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if y.rows() != model.y_dim() || y.cols() != 1 {
        return Err(Error::InvalidParameter(format!(
            "observation must be {}x1, got {}x{}",
            model.y_dim(),
            y.rows(),
            y.cols()
        )));
    }
    model.check_form_dims(kind)?;
    let h = &model.h;
    let hh = h.hermitian();
    match (kind.tag, kind.form) {
        (EstimatorTag::Lmmse, EstimatorForm::Form1) => {
            let cninv_h = model.c_n.solve(h).map_err(|e| e.named("C_n"))?;
            let cninv_y = model.c_n.solve(y).map_err(|e| e.named("C_n"))?;
            let gram = hh
                .mat_mul(&cninv_h)?
                .add(&model.c_x.inverse().map_err(|e| e.named("C_x"))?)?;
            gram.solve(&hh.mat_mul(&cninv_y)?)
                .map_err(|e| e.named("H^H C_n^-1 H + C_x^-1"))
        }
        (EstimatorTag::Lmmse, EstimatorForm::Form2) => {
            let cx_hh = model.c_x.mat_mul(&hh)?;
            let inner = h.mat_mul(&cx_hh)?.add(&model.c_n)?;
            cx_hh.mat_mul(&inner.solve(y).map_err(|e| e.named("H C_x H^H + C_n"))?)
        }
        (EstimatorTag::Gls, EstimatorForm::Form1) => {
            let cninv_h = model.c_n.solve(h).map_err(|e| e.named("C_n"))?;
            let cninv_y = model.c_n.solve(y).map_err(|e| e.named("C_n"))?;
            let gram = hh.mat_mul(&cninv_h)?;
            gram.solve(&hh.mat_mul(&cninv_y)?)
                .map_err(|e| e.named("H^H C_n^-1 H"))
        }
        (EstimatorTag::Gls, EstimatorForm::Form2) => {
            let cx_hh = model.c_x.mat_mul(&hh)?;
            let inner = h.mat_mul(&cx_hh)?;
            cx_hh.mat_mul(&inner.solve(y).map_err(|e| e.named("H C_x H^H"))?)
        }
        (EstimatorTag::Gmf, _) => {
            let cninv_y = model.c_n.solve(y).map_err(|e| e.named("C_n"))?;
            model.c_x.mat_mul(&hh.mat_mul(&cninv_y)?)
        }
        (EstimatorTag::Rls, EstimatorForm::Form1) => {
            let lambda = model.require_lambda()?;
            let gram = hh.mat_mul(h)?.add(&ComplexMatrix::scaled_identity(
                model.x_dim(),
                Complex64::new(lambda, 0.0),
            ))?;
            gram.solve(&hh.mat_mul(y)?).map_err(|e| e.named("H^H H + lambda I"))
        }
        (EstimatorTag::Rls, EstimatorForm::Form2) => {
            let lambda = model.require_lambda()?;
            let inner = h.mat_mul(&hh)?.add(&ComplexMatrix::scaled_identity(
                model.y_dim(),
                Complex64::new(lambda, 0.0),
            ))?;
            hh.mat_mul(&inner.solve(y).map_err(|e| e.named("H H^H + lambda I"))?)
        }
        (EstimatorTag::Ols, EstimatorForm::Form1) => {
            let gram = hh.mat_mul(h)?;
            gram.solve(&hh.mat_mul(y)?).map_err(|e| e.named("H^H H"))
        }
        (EstimatorTag::Ols, EstimatorForm::Form2) => {
            let inner = h.mat_mul(&hh)?;
            hh.mat_mul(&inner.solve(y).map_err(|e| e.named("H H^H"))?)
        }
        (EstimatorTag::Omf, _) => {
            let lambda = model.require_lambda()?;
            Ok(hh.mat_mul(y)?.scale_re(1.0 / lambda))
        }
    }
}

/// Build the partitioned P matrix that makes a MiLAC with `N = Y` input and
/// `M = X` output ports return the selected estimate on its output ports.
///
/// Layouts, written `[[p11, p12], [p21, p22]]` with the upper sign branch:
///
/// ```text
/// LMMSE        [[+C_n,  H], [H^H, -C_x^-1]]       (both forms)
/// GLS  Form1   [[+C_n,  H], [H^H,  0]]
/// GLS  Form2   [[0,     H], [H^H, -C_x^-1]]
/// GMF          [[+C_n,  0], [H^H, -C_x^-1]]       (both forms)
/// RLS  Form1   [[+I,    H], [H^H, -lambda I]]
/// RLS  Form2   [[+lambda I, H], [H^H, -I]]
/// OLS  Form1   [[+I,    H], [H^H,  0]]
/// OLS  Form2   [[0,     H], [H^H, -I]]
/// OMF  Form1   [[+I,    0], [H^H, -lambda I]]
/// OMF  Form2   [[+lambda I, 0], [H^H, -I]]
/// ```
///
/// Construction always succeeds for a valid model; invertibility issues
/// surface at simulation time.
pub fn build_p(model: &ObservationModel, kind: EstimatorKind, sign: SignBranch) -> Result<PartitionedP> {
    let (x, y) = (model.x_dim(), model.y_dim());
    let s = sign.plus();
    let h = model.h.clone();
    let hh = model.h.hermitian();
    let zero_12 = ComplexMatrix::zeros(y, x);

    let cx_inv_scaled = |sgn: f64| -> Result<ComplexMatrix> {
        Ok(model.c_x.inverse().map_err(|e| e.named("C_x"))?.scale_re(sgn))
    };
    let scaled_eye = |n: usize, v: f64| ComplexMatrix::scaled_identity(n, Complex64::new(v, 0.0));

    let (p11, p12, p22) = match (kind.tag, kind.form) {
        (EstimatorTag::Lmmse, _) => (model.c_n.scale_re(s), h, cx_inv_scaled(-s)?),
        (EstimatorTag::Gls, EstimatorForm::Form1) => {
            (model.c_n.scale_re(s), h, ComplexMatrix::zeros(x, x))
        }
        (EstimatorTag::Gls, EstimatorForm::Form2) => {
            (ComplexMatrix::zeros(y, y), h, cx_inv_scaled(-s)?)
        }
        (EstimatorTag::Gmf, _) => (model.c_n.scale_re(s), zero_12, cx_inv_scaled(-s)?),
        (EstimatorTag::Rls, EstimatorForm::Form1) => {
            let lambda = model.require_lambda()?;
            (scaled_eye(y, s), h, scaled_eye(x, -s * lambda))
        }
        (EstimatorTag::Rls, EstimatorForm::Form2) => {
            let lambda = model.require_lambda()?;
            (scaled_eye(y, s * lambda), h, scaled_eye(x, -s))
        }
        (EstimatorTag::Ols, EstimatorForm::Form1) => {
            (scaled_eye(y, s), h, ComplexMatrix::zeros(x, x))
        }
        (EstimatorTag::Ols, EstimatorForm::Form2) => {
            (ComplexMatrix::zeros(y, y), h, scaled_eye(x, -s))
        }
        (EstimatorTag::Omf, EstimatorForm::Form1) => {
            let lambda = model.require_lambda()?;
            (scaled_eye(y, s), zero_12, scaled_eye(x, -s * lambda))
        }
        (EstimatorTag::Omf, EstimatorForm::Form2) => {
            let lambda = model.require_lambda()?;
            (scaled_eye(y, s * lambda), zero_12, scaled_eye(x, -s))
        }
    };
    PartitionedP::new(p11, p12, hh, p22)
}

/// Compute the estimate on a simulated MiLAC: synthesize the component grid
/// for [`build_p`], apply `y` on the input ports and read the output ports.
/// Must match [`estimate_digital`] to high accuracy whenever the selected
/// form exists.
pub fn estimate_analog(
    model: &ObservationModel,
    kind: EstimatorKind,
    sign: SignBranch,
    y0: f64,
    y: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let p = build_p(model, kind, sign)?;
    let net = MilacNetwork::from_p(&p, y0)?;
    Ok(net.simulate_nodal(y)?.v_out)
}

/// Real operations needed to configure the MiLAC for an estimator of
/// dimensions X×Y: `6 X Y` for the kinds whose layout mixes H with
/// covariance or identity diagonals, `4 X Y` for the matched-filtering
/// kinds whose layout has a zero off-diagonal block.
pub fn config_op_count(tag: EstimatorTag, x: u64, y: u64) -> u64 {
    match tag {
        EstimatorTag::Lmmse | EstimatorTag::Gls | EstimatorTag::Rls | EstimatorTag::Ols => 6 * x * y,
        EstimatorTag::Gmf | EstimatorTag::Omf => 4 * x * y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hpd, random_matrix, test_rng};
    use approx::assert_relative_eq;

    fn scalar_model(h: f64, lambda: f64) -> ObservationModel {
        ObservationModel::new(
            ComplexMatrix::from_real_rows(&[vec![h]]).unwrap(),
            ComplexMatrix::identity(1),
            ComplexMatrix::identity(1),
            lambda,
        )
        .unwrap()
    }

    fn random_model(x: usize, y: usize, seed: u64) -> ObservationModel {
        let mut rng = test_rng(seed);
        ObservationModel::new(
            random_matrix(y, x, &mut rng),
            random_hpd(x, &mut rng),
            random_hpd(y, &mut rng),
            0.7,
        )
        .unwrap()
    }

    #[test]
    fn scalar_lmmse() {
        let model = scalar_model(1.0, 1.0);
        let y = ComplexMatrix::real_column(&[2.0]);
        let kind = EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form1);
        let x = estimate_digital(&model, kind, &y).unwrap();
        assert_relative_eq!(x[(0, 0)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn scalar_ols() {
        let model = scalar_model(2.0, 1.0);
        let y = ComplexMatrix::real_column(&[6.0]);
        let kind = EstimatorKind::new(EstimatorTag::Ols, EstimatorForm::Form1);
        let x = estimate_digital(&model, kind, &y).unwrap();
        assert_relative_eq!(x[(0, 0)].re, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn lmmse_forms_agree() {
        let model = random_model(4, 6, 20);
        let y = random_matrix(6, 1, &mut test_rng(21));
        let x1 = estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        let x2 = estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form2),
            &y,
        )
        .unwrap();
        assert!(x1.relative_distance(&x2) < 1e-9);
    }

    #[test]
    fn rls_forms_agree() {
        let model = random_model(5, 3, 22);
        let y = random_matrix(3, 1, &mut test_rng(23));
        let x1 = estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Rls, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        let x2 = estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Rls, EstimatorForm::Form2),
            &y,
        )
        .unwrap();
        assert!(x1.relative_distance(&x2) < 1e-10);
    }

    #[test]
    fn gls_ols_form_dimension_gate() {
        // Fat H (Y < X): Form1 is rejected up front, Form2 exists.
        let model = random_model(5, 3, 24);
        let y = random_matrix(3, 1, &mut test_rng(25));
        for tag in [EstimatorTag::Gls, EstimatorTag::Ols] {
            let err = estimate_digital(&model, EstimatorKind::new(tag, EstimatorForm::Form1), &y);
            assert!(matches!(err, Err(Error::InvalidParameter(_))), "{tag:?}");
            estimate_digital(&model, EstimatorKind::new(tag, EstimatorForm::Form2), &y).unwrap();
        }
    }

    #[test]
    fn table_rows_scalar_examples() {
        // RLS Form1, H = [1], lambda = 1, upper sign.
        let model = scalar_model(1.0, 1.0);
        let p = build_p(
            &model,
            EstimatorKind::new(EstimatorTag::Rls, EstimatorForm::Form1),
            SignBranch::Upper,
        )
        .unwrap();
        let full = p.assemble().unwrap();
        for (idx, want) in [((0, 0), 1.0), ((0, 1), 1.0), ((1, 0), 1.0), ((1, 1), -1.0)] {
            assert_relative_eq!(full[idx].re, want);
        }

        // OLS Form2, H = [2], upper sign.
        let model = scalar_model(2.0, 1.0);
        let p = build_p(
            &model,
            EstimatorKind::new(EstimatorTag::Ols, EstimatorForm::Form2),
            SignBranch::Upper,
        )
        .unwrap();
        let full = p.assemble().unwrap();
        for (idx, want) in [((0, 0), 0.0), ((0, 1), 2.0), ((1, 0), 2.0), ((1, 1), -1.0)] {
            assert_relative_eq!(full[idx].re, want);
        }

        // OMF Form1, H = [3], lambda = 2, upper sign.
        let model = scalar_model(3.0, 2.0);
        let p = build_p(
            &model,
            EstimatorKind::new(EstimatorTag::Omf, EstimatorForm::Form1),
            SignBranch::Upper,
        )
        .unwrap();
        let full = p.assemble().unwrap();
        for (idx, want) in [((0, 0), 1.0), ((0, 1), 0.0), ((1, 0), 3.0), ((1, 1), -2.0)] {
            assert_relative_eq!(full[idx].re, want);
        }
    }

    #[test]
    fn analog_scalar_examples() {
        // RLS: (H^H H + lambda)^-1 H^H y = 2/2 = 1.
        let model = scalar_model(1.0, 1.0);
        let y = ComplexMatrix::real_column(&[2.0]);
        let kind = EstimatorKind::new(EstimatorTag::Rls, EstimatorForm::Form1);
        let v2 = estimate_analog(&model, kind, SignBranch::Upper, 1.0, &y).unwrap();
        assert_relative_eq!(v2[(0, 0)].re, 1.0, epsilon = 1e-12);

        // OMF: lambda^-1 H^H y = 3 * 4 / 2 = 6.
        let model = scalar_model(3.0, 2.0);
        let y = ComplexMatrix::real_column(&[4.0]);
        let kind = EstimatorKind::new(EstimatorTag::Omf, EstimatorForm::Form1);
        let v2 = estimate_analog(&model, kind, SignBranch::Upper, 1.0, &y).unwrap();
        assert_relative_eq!(v2[(0, 0)].re, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn analog_matches_digital_all_kinds() {
        let model = random_model(5, 8, 26);
        let y = random_matrix(8, 1, &mut test_rng(27));
        let mut checked = 0;
        for tag in EstimatorTag::ALL {
            for form in [EstimatorForm::Form1, EstimatorForm::Form2] {
                let kind = EstimatorKind::new(tag, form);
                if model.check_form_dims(kind).is_err() {
                    continue;
                }
                let digital = estimate_digital(&model, kind, &y).unwrap();
                for sign in [SignBranch::Upper, SignBranch::Lower] {
                    let analog = estimate_analog(&model, kind, sign, 0.02, &y).unwrap();
                    assert!(
                        analog.relative_distance(&digital) < 1e-8,
                        "{tag:?} {form:?} {sign:?}: {}",
                        analog.relative_distance(&digital)
                    );
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 20); // 6 tags x 2 forms x 2 signs, minus 2 OLS/GLS fat-H form gates x 2 signs
    }

    #[test]
    fn sign_branches_agree() {
        let model = random_model(3, 5, 28);
        let y = random_matrix(5, 1, &mut test_rng(29));
        for tag in EstimatorTag::ALL {
            for form in [EstimatorForm::Form1, EstimatorForm::Form2] {
                let kind = EstimatorKind::new(tag, form);
                if model.check_form_dims(kind).is_err() {
                    continue;
                }
                let up = estimate_analog(&model, kind, SignBranch::Upper, 1.0, &y).unwrap();
                let lo = estimate_analog(&model, kind, SignBranch::Lower, 1.0, &y).unwrap();
                assert!(up.relative_distance(&lo) < 1e-9, "{tag:?} {form:?}");
            }
        }
    }

    #[test]
    fn y0_invariance() {
        let model = random_model(4, 6, 30);
        let y = random_matrix(6, 1, &mut test_rng(31));
        let kind = EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form2);
        let a = estimate_analog(&model, kind, SignBranch::Upper, 0.02, &y).unwrap();
        let b = estimate_analog(&model, kind, SignBranch::Upper, 1.0, &y).unwrap();
        assert!(a.relative_distance(&b) < 1e-10);
    }

    #[test]
    fn rls_approaches_ols_for_tiny_lambda() {
        let mut rng = test_rng(32);
        let h = random_matrix(7, 4, &mut rng);
        let y = random_matrix(7, 1, &mut rng);
        let rls_model = ObservationModel::with_identity_covariances(h.clone(), 1e-8).unwrap();
        let ols_model = ObservationModel::with_identity_covariances(h, 1.0).unwrap();
        let rls = estimate_digital(
            &rls_model,
            EstimatorKind::new(EstimatorTag::Rls, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        let ols = estimate_digital(
            &ols_model,
            EstimatorKind::new(EstimatorTag::Ols, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        assert!(rls.relative_distance(&ols) < 1e-5);
    }

    #[test]
    fn lmmse_approaches_gls_for_huge_prior_variance() {
        let mut rng = test_rng(33);
        let h = random_matrix(6, 4, &mut rng);
        let c_n = random_hpd(6, &mut rng);
        let y = random_matrix(6, 1, &mut rng);
        let big_cx = ComplexMatrix::scaled_identity(4, Complex64::new(1e8, 0.0));
        let lmmse_model = ObservationModel::new(h.clone(), big_cx, c_n.clone(), 1.0).unwrap();
        let gls_model = ObservationModel::new(h, ComplexMatrix::identity(4), c_n, 1.0).unwrap();
        let lmmse = estimate_digital(
            &lmmse_model,
            EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        let gls = estimate_digital(
            &gls_model,
            EstimatorKind::new(EstimatorTag::Gls, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        assert!(lmmse.relative_distance(&gls) < 1e-5);
    }

    #[test]
    fn gmf_is_small_prior_limit_of_lmmse() {
        let mut rng = test_rng(34);
        let h = random_matrix(6, 4, &mut rng);
        let c_n = random_hpd(6, &mut rng);
        let y = random_matrix(6, 1, &mut rng);
        let eps_cx = ComplexMatrix::scaled_identity(4, Complex64::new(1e-8, 0.0));
        let model = ObservationModel::new(h, eps_cx, c_n, 1.0).unwrap();
        let lmmse = estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form2),
            &y,
        )
        .unwrap();
        let gmf = estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Gmf, EstimatorForm::Form1),
            &y,
        )
        .unwrap();
        assert!(lmmse.relative_distance(&gmf) < 1e-5);
    }

    #[test]
    fn config_op_counts() {
        assert_eq!(config_op_count(EstimatorTag::Lmmse, 4, 4), 96);
        assert_eq!(config_op_count(EstimatorTag::Omf, 4, 4), 64);
        assert_eq!(config_op_count(EstimatorTag::Rls, 1, 1), 6);
    }

    #[test]
    fn model_validation() {
        let mut rng = test_rng(35);
        let h = random_matrix(3, 2, &mut rng);
        // Non-Hermitian covariance.
        let bad = random_matrix(2, 2, &mut rng);
        assert!(matches!(
            ObservationModel::new(h.clone(), bad, ComplexMatrix::identity(3), 1.0),
            Err(Error::NotHermitianPd { .. })
        ));
        // Indefinite covariance.
        let indef = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(
            ObservationModel::new(h.clone(), indef, ComplexMatrix::identity(3), 1.0),
            Err(Error::NotHermitianPd { .. })
        ));
        // Missing regularizer only matters for the kinds that use it.
        let model = ObservationModel::with_identity_covariances(h, 0.0).unwrap();
        let y = ComplexMatrix::zeros(3, 1);
        assert!(estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Ols, EstimatorForm::Form1),
            &y
        )
        .is_ok());
        assert!(estimate_digital(
            &model,
            EstimatorKind::new(EstimatorTag::Omf, EstimatorForm::Form1),
            &y
        )
        .is_err());
    }
}
