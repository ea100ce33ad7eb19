//! Property and invariant tests across the library.

use milac::beamforming::{
    self, arbitrary_tx_network, lmmse_inspired_network, precoder_unnormalized, BeamformerSpec,
    Normalization, Side, Strategy,
};
use milac::estimators::{
    build_p, estimate_analog, estimate_digital, EstimatorForm, EstimatorKind, EstimatorTag,
    ObservationModel, SignBranch,
};
use milac::linksim::{lloyd_max_codebook, qpsk_demap, qpsk_map, rayleigh_channel, trial_rng};
use milac::network::{simulate_blockwise, BlockVariant, MilacNetwork, PartitionedP};
use milac::numerics::ComplexMatrix;
use milac::testutil::{random_hpd, random_matrix, random_well_conditioned, test_rng};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;
use rand::Rng;
use rand_distr::StandardNormal;

fn matrix_strategy(rows: usize, cols: usize) -> impl proptest::strategy::Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), rows * cols).prop_map(move |vals| {
        ComplexMatrix::from_fn(rows, cols, |i, k| {
            let (re, im) = vals[i * cols + k];
            Complex64::new(re, im)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mat_mul_is_associative(
        a in matrix_strategy(5, 3),
        b in matrix_strategy(3, 6),
        c in matrix_strategy(6, 4),
    ) {
        let left = a.mat_mul(&b).unwrap().mat_mul(&c).unwrap();
        let right = a.mat_mul(&b.mat_mul(&c).unwrap()).unwrap();
        prop_assert!(left.relative_distance(&right) < 1e-11);
    }

    #[test]
    fn qpsk_round_trips(bits in proptest::collection::vec(0u8..2, 0..200)) {
        let bits = if bits.len() % 2 == 0 { bits } else { bits[..bits.len() - 1].to_vec() };
        let symbols = qpsk_map(&bits).unwrap();
        prop_assert_eq!(qpsk_demap(&symbols), bits);
    }

    #[test]
    fn network_text_round_trips(seed in proptest::num::u64::ANY, n in 1usize..5, m in 1usize..5) {
        let grid = random_matrix(n + m, n + m, &mut test_rng(seed));
        let net = MilacNetwork::new(n, m, 0.02, grid).unwrap();
        let parsed = MilacNetwork::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(&net, &parsed);
        prop_assert_eq!(net.to_text(), parsed.to_text());
    }

    #[test]
    fn synthesis_round_trips(seed in proptest::num::u64::ANY, n in 1usize..6, m in 1usize..6) {
        let full = random_matrix(n + m, n + m, &mut test_rng(seed));
        let p = PartitionedP::from_full(&full, n).unwrap();
        for y0 in [0.02, 1.0] {
            let net = MilacNetwork::from_p(&p, y0).unwrap();
            let back = net.p_matrix().assemble().unwrap();
            prop_assert!(back.relative_distance(&full) < 1e-13);
        }
    }

    #[test]
    fn double_inverse_returns_input(seed in proptest::num::u64::ANY, n in 1usize..12) {
        let a = random_well_conditioned(n, &mut test_rng(seed));
        let twice = a.inverse().unwrap().inverse().unwrap();
        prop_assert!(twice.relative_distance(&a) < 1e-8);
    }

    #[test]
    fn solve_residual_is_tiny(seed in proptest::num::u64::ANY, n in 1usize..24, m in 1usize..4) {
        let mut rng = test_rng(seed);
        let a = random_matrix(n, n, &mut rng);
        let b = random_matrix(n, m, &mut rng);
        match a.solve(&b) {
            Ok(x) => {
                let resid = a.mat_mul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
                let denom = a.frobenius_norm() * x.frobenius_norm() + b.frobenius_norm();
                prop_assert!(resid / denom < 1e-10);
            }
            // A random Gaussian matrix is almost surely nonsingular; a
            // singularity report here is acceptable only as an extreme
            // conditioning event, never a panic.
            Err(milac::Error::Singular { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }
}

/// Nodal and blockwise simulators agree on random partitioned networks.
#[test]
fn nodal_blockwise_equivalence_sweep() {
    let mut rng = test_rng(1001);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(1..=8usize);
        let m = rng.random_range(1..=8usize);
        let full = random_matrix(n + m, n + m, &mut rng);
        let p = PartitionedP::from_full(&full, n).unwrap();
        let u = random_matrix(n, 1, &mut rng);
        let net = MilacNetwork::from_p(&p, 0.02).unwrap();
        let nodal = match net.simulate_nodal(&u) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let mut ok = true;
        for variant in [BlockVariant::ViaP11, BlockVariant::ViaP22] {
            match simulate_blockwise(&p, &u, variant) {
                Ok(block) => {
                    assert!(
                        nodal.v_out.relative_distance(&block.v_out) < 1e-9,
                        "v_out mismatch for {variant:?}"
                    );
                    assert!(
                        nodal.v_in.relative_distance(&block.v_in) < 1e-9,
                        "v_in mismatch for {variant:?}"
                    );
                }
                Err(_) => ok = false,
            }
        }
        if ok {
            checked += 1;
        }
    }
}

/// Analog beamforming reproduces the digital matrices on 200 random
/// channels of assorted sizes.
#[test]
fn analog_digital_beamformer_equivalence_sweep() {
    let mut rng = test_rng(1002);
    for trial in 0..200 {
        let n_r = rng.random_range(1..=16usize);
        let n_t = rng.random_range(n_r..=16usize);
        let h = rayleigh_channel(n_r, n_t, &mut rng);
        let s = random_matrix(n_r, 1, &mut rng);
        let lambda = 0.3;

        // Arbitrary synthesis applies exactly the digital matrix.
        let w = precoder_unnormalized(Strategy::RZfbf, &h, lambda).unwrap();
        let net = arbitrary_tx_network(&w, 0.02).unwrap();
        let got = net.simulate_nodal(&s).unwrap().v_out;
        let want = w.mat_mul(&s).unwrap();
        assert!(got.relative_distance(&want) < 1e-8, "trial {trial}: arbitrary");

        // Estimator-computed networks match the unnormalized closed forms.
        // Matched beamforming comes out of the network as lambda^-1 H^H.
        for strategy in [Strategy::RZfbf, Strategy::Zfbf, Strategy::Mbf] {
            let spec = BeamformerSpec {
                strategy,
                side: Side::Transmitter,
                lambda,
                normalization: Normalization::FrobeniusGlobal,
                matrix: None,
            };
            let net = lmmse_inspired_network(&spec, &h, 0.02).unwrap();
            let got = net.simulate_nodal(&s).unwrap().v_out;
            let f = precoder_unnormalized(strategy, &h, lambda).unwrap();
            let scale = if strategy == Strategy::Mbf { 1.0 / lambda } else { 1.0 };
            let want = f.mat_mul(&s).unwrap().scale_re(scale);
            assert!(
                got.relative_distance(&want) < 1e-8,
                "trial {trial}: {strategy:?} distance {}",
                got.relative_distance(&want)
            );
        }
    }
}

/// Both sign branches of every estimator layout compute the same estimate.
#[test]
fn sign_branch_invariance_sweep() {
    let mut rng = test_rng(1003);
    for _ in 0..50 {
        let x = rng.random_range(1..=6usize);
        let y = rng.random_range(1..=6usize);
        let model = ObservationModel::new(
            random_matrix(y, x, &mut rng),
            random_hpd(x, &mut rng),
            random_hpd(y, &mut rng),
            0.5 + rng.random_range(0.0..2.0),
        )
        .unwrap();
        let obs = random_matrix(y, 1, &mut rng);
        for tag in EstimatorTag::ALL {
            for form in [EstimatorForm::Form1, EstimatorForm::Form2] {
                let kind = EstimatorKind::new(tag, form);
                let upper = estimate_analog(&model, kind, SignBranch::Upper, 1.0, &obs);
                let lower = estimate_analog(&model, kind, SignBranch::Lower, 1.0, &obs);
                match (upper, lower) {
                    (Ok(a), Ok(b)) => {
                        assert!(a.relative_distance(&b) < 1e-9, "{tag:?} {form:?}")
                    }
                    // Form gates for GLS/OLS reject mismatched shapes the
                    // same way on both branches.
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("sign branches disagree on failure: {a:?} vs {b:?}"),
                }
            }
        }
    }
}

/// The tabulated layouts all produce the full P matrix the simulator can
/// invert, and v_out equals the digital estimate, across assorted shapes.
#[test]
fn estimator_layout_shapes() {
    let mut rng = test_rng(1004);
    for (x, y) in [(1usize, 1usize), (1, 4), (4, 1), (3, 3), (2, 5), (5, 2)] {
        let model = ObservationModel::new(
            random_matrix(y, x, &mut rng),
            random_hpd(x, &mut rng),
            random_hpd(y, &mut rng),
            1.3,
        )
        .unwrap();
        let obs = random_matrix(y, 1, &mut rng);
        for tag in EstimatorTag::ALL {
            for form in [EstimatorForm::Form1, EstimatorForm::Form2] {
                let kind = EstimatorKind::new(tag, form);
                let digital = match estimate_digital(&model, kind, &obs) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                let p = build_p(&model, kind, SignBranch::Upper).unwrap();
                assert_eq!(p.n(), y);
                assert_eq!(p.m(), x);
                let analog = estimate_analog(&model, kind, SignBranch::Upper, 0.02, &obs).unwrap();
                assert!(
                    analog.relative_distance(&digital) < 1e-8,
                    "{tag:?} {form:?} x={x} y={y}"
                );
            }
        }
    }
}

/// Perturbing any quantizer level away from the Lloyd fixed point
/// increases the empirical squared error on a large Gaussian draw.
///
/// Evaluated with sufficient statistics per bin: moving level `c_i` by
/// `d` (bin assignments fixed at the codebook thresholds) changes the
/// summed squared error by `d^2 n_i - 2 d s_i` with `n_i` the bin count
/// and `s_i` the summed deviation from `c_i`. The increase is strict for
/// both signs of `d` exactly when `|s_i| < d n_i / 2`. The sample-centroid
/// noise `s_i / n_i` shrinks as `n^-1/2`, so the perturbation and sample
/// count are sized to leave a wide margin over that noise even in the
/// thinnest bins.
#[test]
fn quantizer_levels_are_empirically_optimal() {
    let delta = 1e-2;
    let n_samples = 4_000_000usize;
    for bits in [1u32, 2, 4] {
        let cb = lloyd_max_codebook(bits).unwrap();
        let n_levels = cb.levels().len();
        let mut counts = vec![0u64; n_levels];
        let mut dev_sums = vec![0.0f64; n_levels];
        let mut rng = trial_rng(0xC0DEB00C, bits as u64);
        for _ in 0..n_samples {
            let x: f64 = rng.sample(StandardNormal);
            let idx = cb.thresholds().partition_point(|&t| t <= x);
            counts[idx] += 1;
            dev_sums[idx] += x - cb.levels()[idx];
        }
        for i in 0..n_levels {
            assert!(
                dev_sums[i].abs() < delta * counts[i] as f64 / 2.0,
                "bits {bits}, level {i}: |s| = {}, bound = {}",
                dev_sums[i].abs(),
                delta * counts[i] as f64 / 2.0
            );
        }
    }
}

/// The analog estimate does not depend on the reference admittance.
#[test]
fn estimate_analog_y0_invariance_sweep() {
    let mut rng = test_rng(1005);
    for _ in 0..20 {
        let x = rng.random_range(1..=5usize);
        let y = rng.random_range(1..=5usize);
        let model = ObservationModel::new(
            random_matrix(y, x, &mut rng),
            random_hpd(x, &mut rng),
            random_hpd(y, &mut rng),
            0.9,
        )
        .unwrap();
        let obs = random_matrix(y, 1, &mut rng);
        let kind = EstimatorKind::new(EstimatorTag::Lmmse, EstimatorForm::Form1);
        let a = estimate_analog(&model, kind, SignBranch::Upper, 0.02, &obs).unwrap();
        let b = estimate_analog(&model, kind, SignBranch::Upper, 1.0, &obs).unwrap();
        assert!(a.relative_distance(&b) < 1e-10);
    }
}

/// DFT networks stay unitary through the circuit for a spread of sizes.
#[test]
fn dft_network_parseval_sweep() {
    let mut rng = test_rng(1006);
    for n in [1usize, 2, 4, 8, 16, 64] {
        let g = beamforming::dft_matrix(n);
        let gram = g.hermitian().mat_mul(&g).unwrap();
        assert!(gram.relative_distance(&ComplexMatrix::identity(n)) < 1e-10);

        let y = random_matrix(n, 1, &mut rng);
        let v = beamforming::dft_network(n, 0.02)
            .unwrap()
            .simulate_nodal(&y)
            .unwrap()
            .v_out;
        assert!((v.frobenius_norm() - y.frobenius_norm()).abs() < 1e-10, "n = {n}");
    }
}
