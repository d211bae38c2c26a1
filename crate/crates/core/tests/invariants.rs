//! Property tests for the algebraic invariants: annihilation and shift
//! closure of measures, degree reduction and linearity of differencing, the
//! kernel/structure-function bridge, and closed-form vs KKT kriging weights.

use irf_core::covariance::{cov_between_measures, structure_from_icf, IntrinsicCovariance};
use irf_core::kriging::{build_system, solve_closed_form, solve_kkt, KrigingProblem};
use irf_core::measure::{construct_allowable, finite_difference_measure};
use irf_core::process::{PathMeta, PolynomialTrend, SampledPath};
use irf_core::TOL_ANNIHILATION;
use proptest::prelude::*;

/// Exact dyadic rationals keep every offset computation free of rounding,
/// so dual routes evaluate kernels at bitwise-identical arguments.
fn dyadic(range: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = f64> {
    range.prop_map(|k| k as f64 / 64.0)
}

fn distinct_dyadics(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(-256i32..=256, min_len..=max_len)
        .prop_map(|s| s.into_iter().map(|k| k as f64 / 64.0).collect())
}

fn random_path(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, len..=len)
}

fn path(values: Vec<f64>) -> SampledPath {
    SampledPath::new(0.0, 0.25, values, PathMeta::default()).unwrap()
}

proptest! {
    #[test]
    fn constructed_measures_annihilate_low_degrees(
        points in distinct_dyadics(5, 9),
        d in 1usize..=3,
    ) {
        let m = construct_allowable(&points, d).unwrap();
        let report = m.is_allowable(d, TOL_ANNIHILATION).unwrap();
        prop_assert!(report.allowable, "defects: {:?}", report.defects);
    }

    #[test]
    fn allowability_is_closed_under_shifts(
        points in distinct_dyadics(5, 9),
        d in 1usize..=3,
        h in dyadic(-640..=640),
    ) {
        let m = construct_allowable(&points, d).unwrap();
        let shifted = m.shift(h);
        prop_assert!(shifted.is_allowable(d, TOL_ANNIHILATION).unwrap().allowable);
    }

    #[test]
    fn allowability_nests_downward(
        points in distinct_dyadics(6, 9),
        d in 2usize..=3,
    ) {
        let m = construct_allowable(&points, d).unwrap();
        for lower in 1..d {
            prop_assert!(m.is_allowable(lower, TOL_ANNIHILATION).unwrap().allowable);
        }
    }

    #[test]
    fn difference_measure_annihilates_below_and_hits_at_order(
        d in 1usize..=4,
        iota_num in 1i32..=128,
        t in dyadic(-128..=128),
    ) {
        let iota = iota_num as f64 / 64.0;
        let m = finite_difference_measure(d, iota, t);
        for ell in 0..d {
            let defect = m.apply(|x| if ell == 0 { 1.0 } else { x.powi(ell as i32) }).unwrap();
            let scale: f64 = m.atoms().iter()
                .map(|&(x, w)| w.abs() * x.abs().max(1.0).powi(ell as i32))
                .sum();
            prop_assert!(defect.abs() <= 1e-10 * scale, "ell={ell} defect={defect}");
        }
        let leading = m.apply(|x| x.powi(d as i32)).unwrap();
        let expected = (1..=d).product::<usize>() as f64 * iota.powi(d as i32);
        prop_assert!((leading - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn differencing_is_linear(
        a in random_path(24),
        b in random_path(24),
        alpha in -4.0f64..4.0,
        beta in -4.0f64..4.0,
        d in 1usize..=3,
    ) {
        let combined: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let lhs = path(combined).difference(d, 1).unwrap();
        let da = path(a).difference(d, 1).unwrap();
        let db = path(b).difference(d, 1).unwrap();
        for ((l, x), y) in lhs.values().iter().zip(da.values()).zip(db.values()) {
            let rhs = alpha * x + beta * y;
            let scale = l.abs().max(rhs.abs()).max(1.0);
            prop_assert!((l - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn differencing_composes(
        values in random_path(30),
        d in 2usize..=3,
        m in 1usize..=2,
    ) {
        let p = path(values);
        let direct = p.difference(d, m).unwrap();
        let nested = p.difference(1, m).unwrap().difference(d - 1, m).unwrap();
        prop_assert_eq!(direct.len(), nested.len());
        for (a, b) in direct.values().iter().zip(nested.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn differencing_reduces_polynomial_degree(
        coeffs in prop::collection::vec(-1.0f64..1.0, 2..=7),
    ) {
        let trend = PolynomialTrend::new(coeffs.clone());
        let n = 48usize;
        let grid: Vec<f64> = (0..n).map(|j| j as f64 * 0.25).collect();
        let values: Vec<f64> = grid.iter().map(|&t| trend.eval(t)).collect();
        let p = SampledPath::new(0.0, 0.25, values, PathMeta::default()).unwrap();
        let degree = coeffs.len() - 1;

        // One application: the samples fit a polynomial one degree lower.
        let once = p.difference(1, 1).unwrap();
        let ts: Vec<f64> = (0..once.len()).map(|j| once.time(j)).collect();
        let reduced_degree = degree.saturating_sub(1);
        let fit = PolynomialTrend::fit(&ts, once.values(), reduced_degree).unwrap();
        let scale = once.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (j, &t) in ts.iter().enumerate() {
            prop_assert!(
                (fit.eval(t) - once.values()[j]).abs() <= 1e-8 * scale,
                "degree {degree} not reduced"
            );
        }

        // Applying the operator `degree + 1` times kills the polynomial.
        let killed = p.difference(degree + 1, 1).unwrap();
        for v in killed.values() {
            prop_assert!(v.abs() <= 1e-10 * scale.max(1.0), "residual {v}");
        }
    }
}

fn wide_tabulated_kernel() -> IntrinsicCovariance {
    // Gaussian-shaped table: cheap to evaluate, defined out to |h| = 24.
    let knots: Vec<f64> = (0..=480).map(|k| k as f64 / 20.0).collect();
    let vals: Vec<f64> = knots.iter().map(|&h| (-(h / 2.0).powi(2)).exp()).collect();
    IntrinsicCovariance::tabulated(knots, vals, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bridge_identity_structure_equals_measure_covariance(
        d in 1usize..=3,
        i1 in dyadic(16..=128),
        i2 in dyadic(16..=128),
        t in dyadic(-128..=128),
        s in dyadic(-128..=128),
    ) {
        let kernel = wide_tabulated_kernel();
        let tau = t - s;
        let via_formula = structure_from_icf(&kernel, d, i1, i2, tau).unwrap();
        let l1 = finite_difference_measure(d, i1, t);
        let l2 = finite_difference_measure(d, i2, s);
        let via_measures = cov_between_measures(&kernel, &l1, &l2).unwrap();
        // Shared-term mass bounds the summation-order error.
        let mut mass = 0.0;
        for &(x1, w1) in l1.atoms() {
            for &(x2, w2) in l2.atoms() {
                mass += (w1 * w2 * kernel.eval(x1 - x2).unwrap()).abs();
            }
        }
        let scale = via_formula.abs().max(via_measures.abs()).max(1e-12 * mass).max(1e-300);
        prop_assert!(
            (via_formula - via_measures).abs() <= 1e-12 * scale,
            "d={d}: {via_formula} vs {via_measures}"
        );
    }
}

#[test]
fn closed_form_weights_match_kkt_on_random_problems() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
    let kernels = [
        IntrinsicCovariance::brownian(1.0).unwrap(),
        wide_tabulated_kernel(),
    ];
    for case in 0..60 {
        let d = rng.random_range(1..=3usize);
        let n_min = d.max(2);
        let n = rng.random_range(n_min..=10usize);
        let kernel = &kernels[case % 2];
        // Distinct dyadic observation sites.
        let mut sites: Vec<i32> = Vec::new();
        while sites.len() < n {
            let c = rng.random_range(-24..=24i32);
            if !sites.contains(&c) {
                sites.push(c);
            }
        }
        let obs_t: Vec<f64> = sites.iter().map(|&k| k as f64 / 8.0).collect();
        let obs_x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let nugget = [0.0, 0.1, 1.0][case % 3];
        let t0 = rng.random_range(-28..=28i32) as f64 / 8.0;

        let problem = KrigingProblem::new(obs_t, obs_x, d, kernel.clone(), nugget).unwrap();
        let sys = build_system(&problem, t0).unwrap();
        let eta = solve_closed_form(&sys, nugget).unwrap();
        let (eta_kkt, _) = solve_kkt(&sys, nugget).unwrap();
        let scale = 1.0 + eta_kkt.amax();
        for i in 0..eta.len() {
            assert!(
                (eta[i] - eta_kkt[i]).abs() <= 1e-8 * scale,
                "case {case}: weight {i} differs: {} vs {}",
                eta[i],
                eta_kkt[i]
            );
        }
        // Unbiasedness: the drift constraints hold.
        let feas = sys.q.transpose() * &eta - &sys.q0;
        let q0_scale = 1.0 + sys.q0.amax();
        assert!(
            feas.amax() <= 1e-8 * q0_scale,
            "case {case}: residual {}",
            feas.amax()
        );
    }
}
