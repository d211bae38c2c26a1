//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime (run with `cargo test -p irf-cli --test acceptance --
//! --nocapture` to see them). Tolerances are pinned in the assertions.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use irf_core::covariance::{
    brownian_cov, cov_between_measures, structure_from_icf, IntrinsicCovariance,
};
use irf_core::equivalence::{
    differenced_stationarity_test, negative_control, shift_invariance_test, HarnessConfig,
};
use irf_core::kriging::{build_system, objective, predict, solve_closed_form, solve_kkt};
use irf_core::measure::{construct_allowable, finite_difference_measure, Measure};
use irf_core::process::{
    brownian_path, empirical_structure_function, PathMeta, PolynomialTrend, SampledPath,
};
use irf_core::spectral::{
    kernel_g, theoretical_structure_function, DensityFamily, FrequencyGrid, Spacing, SpectralModel,
    SpectralSynthesizer,
};
use irf_core::{KrigingProblem, TimeGrid, TOL_ANNIHILATION};

fn report(criterion: u32, start: Instant, budget: Duration, what: &str) {
    let elapsed = start.elapsed();
    println!(
        "[acceptance] criterion {criterion} PASS in {:.2}s (budget {:.0}s): {what}",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?}"
    );
}

fn dyadic(rng: &mut ChaCha12Rng, lo: i32, hi: i32) -> f64 {
    rng.random_range(lo..=hi) as f64 / 64.0
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn distinct_dyadic_support(rng: &mut ChaCha12Rng, len: usize) -> Vec<f64> {
    let mut picks: Vec<i32> = Vec::new();
    while picks.len() < len {
        let c = rng.random_range(-256..=256i32);
        if !picks.contains(&c) {
            picks.push(c);
        }
    }
    picks.sort_unstable();
    picks.into_iter().map(|k| k as f64 / 64.0).collect()
}

/// Criterion 1: annihilation and nesting of allowable measures.
#[test]
fn criterion_1_annihilation_suite() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(101);

    for d in 1..=3usize {
        for _ in 0..40 {
            let iota = rng.random_range(1..=192i32) as f64 / 64.0;
            let t = dyadic(&mut rng, -192, 192);
            let fd = finite_difference_measure(d, iota, t);
            let r = fd.is_allowable(d, 1e-10).unwrap();
            assert!(r.allowable, "fd d={d}: {:?}", r.defects);

            let extra = rng.random_range(0..=3usize);
            let support = distinct_dyadic_support(&mut rng, d + 1 + extra);
            let built = construct_allowable(&support, d).unwrap();
            let r = built.is_allowable(d, 1e-10).unwrap();
            assert!(r.allowable, "constructed d={d}: {:?}", r.defects);
        }
    }

    // Nesting on 100 random order-3 measures.
    for _ in 0..100 {
        let extra = rng.random_range(0..=4usize);
        let support = distinct_dyadic_support(&mut rng, 4 + extra);
        let m = construct_allowable(&support, 3).unwrap();
        assert!(m.is_allowable(2, TOL_ANNIHILATION).unwrap().allowable);
        assert!(m.is_allowable(1, TOL_ANNIHILATION).unwrap().allowable);
    }

    report(
        1,
        start,
        Duration::from_secs(1),
        "normalized defects <= 1e-10, nesting holds",
    );
}

/// Criterion 2: the differencing operator reduces polynomial degree.
#[test]
fn criterion_2_degree_reduction() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(202);

    for degree in 0..=6usize {
        for _ in 0..10 {
            let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
            let trend = PolynomialTrend::new(coeffs);
            let n = 48;
            let dt = 0.25;
            let values: Vec<f64> = (0..n).map(|j| trend.eval(j as f64 * dt)).collect();
            let p = SampledPath::new(0.0, dt, values, PathMeta::default()).unwrap();
            let scale = p.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));

            let once = p.difference(1, 1).unwrap();
            let ts: Vec<f64> = (0..once.len()).map(|j| once.time(j)).collect();
            let fit = PolynomialTrend::fit(&ts, once.values(), degree.saturating_sub(1)).unwrap();
            for (j, &t) in ts.iter().enumerate() {
                assert!(
                    (fit.eval(t) - once.values()[j]).abs() <= 1e-8 * scale,
                    "degree {degree} not reduced by one"
                );
            }

            // d applications on degree d-1 give the zero path.
            let killed = p.difference(degree + 1, 1).unwrap();
            for v in killed.values() {
                assert!(v.abs() <= 1e-10 * scale, "residual {v} for degree {degree}");
            }
        }
    }

    report(
        2,
        start,
        Duration::from_secs(1),
        "one difference drops the degree; d wipe out degree d-1",
    );
}

/// Criterion 3: differencing the kernel reproduces the differenced-process
/// spectral factor exactly.
#[test]
fn criterion_3_kernel_identity() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(303);

    for _ in 0..1000 {
        let d = rng.random_range(1..=3usize);
        let t = rng.random_range(-5.0..5.0);
        let w = rng.random_range(-5.0..5.0);
        let iota = rng.random_range(0.05..2.0);

        let mut lhs = Complex64::new(0.0, 0.0);
        for k in 0..=d {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            lhs += sign * binomial(d, k) * kernel_g(d, t - k as f64 * iota, w);
        }
        let rhs = Complex64::new(0.0, w * t).exp()
            * (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -iota * w).exp()).powu(d as u32);
        assert!(
            (lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()),
            "d={d} t={t} w={w} iota={iota}: |lhs-rhs| = {:e}",
            (lhs - rhs).norm()
        );
    }

    report(
        3,
        start,
        Duration::from_secs(1),
        "1000 random kernel-difference identities to 1e-10",
    );
}

/// Criterion 4: Monte Carlo structure function matches the quadrature value
/// at lags {0, iota, 2 iota, 5 iota} within 3 between-replicate standard
/// errors, for d in {1,2} and two density families.
#[test]
fn criterion_4_monte_carlo_vs_quadrature() {
    let start = Instant::now();
    let families = [
        DensityFamily::BandlimitedWhite {
            lo: 1e-3,
            hi: 10.0,
            level: 0.2,
        },
        DensityFamily::Gaussian {
            amplitude: 1.0,
            scale: 1.0,
        },
    ];
    let fgrid = FrequencyGrid::new(1e-3, 1e2, 1024, Spacing::Log).unwrap();
    let grid = TimeGrid {
        t0: 0.0,
        dt: 0.05,
        n: 2000,
    };
    let reps = 200;
    let lags = [0i64, 1, 2, 5];

    for d in 1..=2usize {
        for family in &families {
            let model = SpectralModel::new(d, family.clone()).unwrap();
            let synth = SpectralSynthesizer::new(&model, grid, &fgrid).unwrap();
            let paths = synth.sample_many(4000 + d as u64, reps);
            let est = empirical_structure_function(&paths, d, 1, &lags).unwrap();
            let iota = grid.dt;
            for e in &est {
                let theo =
                    theoretical_structure_function(&model, iota, iota, e.lag, &fgrid).unwrap();
                assert!(
                    (e.estimate - theo).abs() <= 3.0 * e.std_error,
                    "d={d} family={} lag={}: estimate {} vs theoretical {} (se {})",
                    family.name(),
                    e.lag,
                    e.estimate,
                    theo,
                    e.std_error
                );
            }
        }
    }

    report(
        4,
        start,
        Duration::from_secs(120),
        "200 replicates x 2000 points, 2 orders x 2 families",
    );
}

/// Criterion 5: Brownian closed forms, exactly and by simulation.
#[test]
fn criterion_5_brownian_closed_forms() {
    let start = Instant::now();

    // Exact piecewise covariance.
    assert_eq!(brownian_cov(1.0, 2.0, 1.0), 1.0);
    assert_eq!(brownian_cov(2.0, 1.0, 3.0), 3.0);
    assert_eq!(brownian_cov(-1.0, 2.0, 1.0), 0.0);
    assert_eq!(brownian_cov(-3.0, -2.0, 2.0), 4.0);
    assert_eq!(brownian_cov(0.0, 5.0, 1.0), 0.0);
    let mut rng = ChaCha12Rng::seed_from_u64(505);
    for _ in 0..200 {
        let (t, s): (f64, f64) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let c: f64 = rng.random_range(0.1..3.0);
        let expected = if t * s < 0.0 {
            0.0
        } else {
            c * t.abs().min(s.abs())
        };
        assert_eq!(brownian_cov(t, s, c), expected);
        // Increment variance from the covariance is exactly c|t-s|.
        let var = brownian_cov(t, t, c) + brownian_cov(s, s, c) - 2.0 * brownian_cov(t, s, c);
        assert!((var - c * (t - s).abs()).abs() <= 1e-12 * (1.0 + var.abs()));
    }

    // Simulated paths reproduce the variogram C*iota across 5 lags.
    let c = 1.4;
    let grid = TimeGrid {
        t0: 0.0,
        dt: 0.04,
        n: 500,
    };
    let paths: Vec<SampledPath> = (0..300)
        .map(|r| brownian_path(c, &grid, 5100 + r))
        .collect();
    for lag_mult in 1..=5usize {
        let est = empirical_structure_function(&paths, 1, lag_mult, &[0]).unwrap();
        let expected = c * lag_mult as f64 * grid.dt;
        assert!(
            (est[0].estimate - expected).abs() <= 3.0 * est[0].std_error,
            "variogram at {lag_mult} steps: {} vs {expected} (se {})",
            est[0].estimate,
            est[0].std_error
        );
    }

    report(
        5,
        start,
        Duration::from_secs(60),
        "min-covariance exact, variogram C*iota within 3 SE",
    );
}

/// Criterion 6: the kernel bridge. Double binomial sums over the kernel
/// equal measure-contracted covariances to 1e-12 (relative to the
/// double-sum mass), and equal the quadrature for the from-spectral kernel.
#[test]
fn criterion_6_bridge_identity() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(606);

    // Gaussian-shaped tabulated kernel: defined out to |h| = 24, cheap.
    let knots: Vec<f64> = (0..=480).map(|k| k as f64 / 20.0).collect();
    let vals: Vec<f64> = knots.iter().map(|&h| (-(h / 2.0).powi(2)).exp()).collect();
    let tabulated = IntrinsicCovariance::tabulated(knots, vals, 0).unwrap();
    let brownian = IntrinsicCovariance::brownian(1.0).unwrap();

    for case in 0..500 {
        let kernel = if case % 2 == 0 { &tabulated } else { &brownian };
        let d = rng.random_range(1..=3usize);
        let i1 = rng.random_range(16..=128i32) as f64 / 64.0;
        let i2 = rng.random_range(16..=128i32) as f64 / 64.0;
        let t = dyadic(&mut rng, -128, 128);
        let s = dyadic(&mut rng, -128, 128);
        let tau = t - s;

        let via_formula = structure_from_icf(kernel, d, i1, i2, tau).unwrap();
        let l1 = finite_difference_measure(d, i1, t);
        let l2 = finite_difference_measure(d, i2, s);
        let via_measures = cov_between_measures(kernel, &l1, &l2).unwrap();

        // Dyadic inputs keep every offset exact, so the two routes evaluate
        // and accumulate identical terms.
        let scale = via_formula.abs().max(via_measures.abs());
        assert!(
            (via_formula - via_measures).abs() <= 1e-12 * scale,
            "case {case} d={d}: {via_formula} vs {via_measures}"
        );
    }

    // From-spectral kernel at d=1 matches the structure-function quadrature.
    let fgrid = FrequencyGrid::default();
    let model = SpectralModel::new(
        1,
        DensityFamily::Gaussian {
            amplitude: 1.0,
            scale: 1.0,
        },
    )
    .unwrap();
    let kernel = IntrinsicCovariance::from_spectral(model.clone(), fgrid.clone());
    for &(iota, h) in &[(0.5, 0.0), (0.5, 1.0), (1.0, 0.25), (2.0, 3.0)] {
        let via_kernel = structure_from_icf(&kernel, 1, iota, iota, h).unwrap();
        let via_quadrature = theoretical_structure_function(&model, iota, iota, h, &fgrid).unwrap();
        assert!(
            (via_kernel - via_quadrature).abs() <= 1e-6 * via_quadrature.abs().max(1e-12),
            "iota={iota} h={h}: {via_kernel} vs {via_quadrature}"
        );
    }

    report(
        6,
        start,
        Duration::from_secs(30),
        "500 random bridge identities + spectral cross-check",
    );
}

/// Criterion 7: closed-form kriging weights equal the KKT oracle, constraints
/// hold, interpolation is exact at zero nugget, and the objective is minimal
/// among feasible perturbations.
#[test]
fn criterion_7_kriging_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(707);

    let knots: Vec<f64> = (0..=480).map(|k| k as f64 / 20.0).collect();
    let vals: Vec<f64> = knots.iter().map(|&h| (-(h / 2.0).powi(2)).exp()).collect();
    let tabulated = IntrinsicCovariance::tabulated(knots, vals, 0).unwrap();
    let brownian = IntrinsicCovariance::brownian(1.0).unwrap();
    let spectral = IntrinsicCovariance::from_spectral(
        SpectralModel::new(
            0,
            DensityFamily::Gaussian {
                amplitude: 1.0,
                scale: 0.5,
            },
        )
        .unwrap(),
        FrequencyGrid::new(1e-3, 1e2, 512, Spacing::Log).unwrap(),
    );
    let nuggets = [0.0, 0.1, 1.0];

    for case in 0..500usize {
        let kernel = match case % 3 {
            0 => &brownian,
            1 => &tabulated,
            _ => &spectral,
        };
        let nugget = nuggets[case % nuggets.len()];
        let d = rng.random_range(1..=3usize);
        // Brownian psi is singular for n = 1 (K(0) = 0), so give it company.
        let n_min = if case % 3 == 0 { d.max(2) } else { d.max(1) };
        let n = rng.random_range(n_min..=12usize);
        let mut sites: Vec<i32> = Vec::new();
        while sites.len() < n {
            let cand = rng.random_range(-24..=24i32);
            if !sites.contains(&cand) {
                sites.push(cand);
            }
        }
        let obs_t: Vec<f64> = sites.iter().map(|&k| k as f64 / 8.0).collect();
        let obs_x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let t0 = rng.random_range(-28..=28i32) as f64 / 8.0;

        let problem =
            KrigingProblem::new(obs_t.clone(), obs_x.clone(), d, kernel.clone(), nugget).unwrap();
        let sys = build_system(&problem, t0).unwrap();
        let eta = solve_closed_form(&sys, nugget).unwrap();
        let (eta_kkt, rho) = solve_kkt(&sys, nugget).unwrap();

        let scale = 1.0 + eta_kkt.amax();
        for i in 0..eta.len() {
            assert!(
                (eta[i] - eta_kkt[i]).abs() <= 1e-8 * scale,
                "case {case}: weight {i}: {} vs {}",
                eta[i],
                eta_kkt[i]
            );
        }
        let feas = sys.q.transpose() * &eta - &sys.q0;
        assert!(
            feas.amax() <= 1e-8 * (1.0 + sys.q0.amax()),
            "case {case}: constraint residual {}",
            feas.amax()
        );

        // Objective minimality against 100 projected feasible perturbations.
        let m_star = objective(&sys, nugget, &eta_kkt, &rho);
        let q = &sys.q;
        let qtq_inv = (q.transpose() * q).try_inverse().unwrap();
        for _ in 0..100 {
            let raw = DVector::from_fn(n, |_, _| rng.random_range(-0.5..0.5));
            let delta = &raw - q * (&qtq_inv * (q.transpose() * &raw));
            let m = objective(&sys, nugget, &(&eta_kkt + &delta), &rho);
            assert!(
                m >= m_star - 1e-9 * (1.0 + m_star.abs()),
                "case {case}: objective {m} below optimum {m_star}"
            );
        }

        // Exact interpolation at zero nugget.
        if nugget == 0.0 {
            let pick = rng.random_range(0..n);
            let sol = predict(&problem, obs_t[pick]).unwrap();
            assert!(
                (sol.prediction - obs_x[pick]).abs() <= 1e-8 * (1.0 + obs_x[pick].abs()),
                "case {case}: interpolation {} vs {}",
                sol.prediction,
                obs_x[pick]
            );
        }
    }

    report(
        7,
        start,
        Duration::from_secs(30),
        "500 problems: oracle match, feasibility, minimality",
    );
}

/// Criterion 8: the theorem harness is calibrated and has power. Both
/// directions pass in at least 48 of 50 master seeds; the negative control
/// fails in at least 48 of 50.
#[test]
fn criterion_8_theorem_harness() {
    let start = Instant::now();
    let model = SpectralModel::new(
        1,
        DensityFamily::BandlimitedWhite {
            lo: 1e-3,
            hi: 10.0,
            level: 0.2,
        },
    )
    .unwrap();
    let measure = finite_difference_measure(1, 1.0, 2.0);
    let bad = Measure::new(vec![(0.0, 1.0), (1.0, 1.0)], 0).unwrap();
    let trend = PolynomialTrend::new(vec![0.0, 5.0]);
    let shifts = [0.0, 5.0, 20.0];
    let config = HarnessConfig::default();
    let mut diff_config = HarnessConfig::default();
    diff_config.grid.n = 160;

    let mut shift_pass = 0;
    let mut diff_pass = 0;
    let mut negative_fail = 0;
    let n_seeds = 50u64;
    for k in 0..n_seeds {
        let seed = 9000 + 13 * k;
        let r = shift_invariance_test(&model, &measure, &shifts, &[1.0, 3.0], 400, seed, &config)
            .unwrap();
        shift_pass += r.pass as u32;
        let r = differenced_stationarity_test(&model, 1, 1, &[0, 1], 400, seed + 1, &diff_config)
            .unwrap();
        diff_pass += r.pass as u32;
        let r = negative_control(&model, &trend, &bad, &shifts, 200, seed + 2, &config).unwrap();
        negative_fail += (!r.pass) as u32;
    }

    println!(
        "[acceptance]   harness rates: shift {shift_pass}/50, differenced {diff_pass}/50, negative-control failures {negative_fail}/50"
    );
    assert!(
        shift_pass >= 48,
        "shift-invariance pass rate {shift_pass}/50 below 96%"
    );
    assert!(
        diff_pass >= 48,
        "differenced-stationarity pass rate {diff_pass}/50 below 96%"
    );
    assert!(
        negative_fail >= 48,
        "negative control failed in only {negative_fail}/50 seeds"
    );

    report(
        8,
        start,
        Duration::from_secs(600),
        "50 master seeds: calibration >= 96%, power >= 95%",
    );
}

/// Criterion 9: every CLI command is byte-deterministic in (config, seed).
#[test]
fn criterion_9_cli_determinism() {
    use std::fs;
    use std::process::Command;

    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_irf");
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    fs::write(
        root.join("model.json"),
        r#"{"d":1,"family":"bandlimited-white","params":{"lo":0.001,"hi":10.0,"level":0.2}}"#,
    )
    .unwrap();
    fs::write(
        root.join("problem.json"),
        r#"{"t":[0.0,1.0,2.0,3.0],"x":[0.1,0.5,0.3,0.9],"d":1,"icf":{"kind":"brownian","C":1.0},"nugget":0.0}"#,
    )
    .unwrap();

    let model = root.join("model.json").display().to_string();
    let problem = root.join("problem.json").display().to_string();
    let commands: Vec<(&str, Vec<String>, Vec<&str>)> = vec![
        (
            "simulate",
            vec![
                "simulate".into(),
                "--model".into(),
                model.clone(),
                "--n".into(),
                "200".into(),
                "--dt".into(),
                "0.1".into(),
                "--reps".into(),
                "3".into(),
                "--seed".into(),
                "7".into(),
                "--out".into(),
                "OUT".into(),
            ],
            vec!["paths.csv", "paths.config.json"],
        ),
        (
            "difference",
            vec![
                "difference".into(),
                "--input".into(),
                "PREP".into(),
                "--d".into(),
                "1".into(),
                "--out".into(),
                "OUT".into(),
            ],
            vec!["diff.csv", "diff.config.json"],
        ),
        (
            "structfn",
            vec![
                "structfn".into(),
                "--input".into(),
                "PREP".into(),
                "--model".into(),
                model.clone(),
                "--d".into(),
                "1".into(),
                "--lags".into(),
                "0,1,2,5".into(),
                "--out".into(),
                "OUT".into(),
            ],
            vec!["sf.csv", "sf.config.json"],
        ),
        (
            "krige",
            vec![
                "krige".into(),
                "--problem".into(),
                problem.clone(),
                "--targets".into(),
                "0.5,1.5,2.5".into(),
                "--check-kkt".into(),
                "--out".into(),
                "OUT".into(),
            ],
            vec!["pred.csv", "pred.config.json"],
        ),
        (
            "measure",
            vec![
                "measure".into(),
                "construct".into(),
                "--points".into(),
                "0,0.5,1.25,3".into(),
                "--order".into(),
                "2".into(),
                "--out".into(),
                "OUT".into(),
            ],
            vec!["measure.json"],
        ),
        (
            "verify",
            vec![
                "verify".into(),
                "--model".into(),
                model.clone(),
                "--reps".into(),
                "200".into(),
                "--seed".into(),
                "3".into(),
                "--out".into(),
                "OUT".into(),
            ],
            vec!["report.json"],
        ),
    ];

    // Shared input for difference/structfn, produced once per run directory.
    let prep = |run_dir: &std::path::Path| {
        let out = run_dir.join("prep.csv");
        let status = Command::new(bin)
            .args([
                "simulate",
                "--model",
                &model,
                "--n",
                "400",
                "--dt",
                "0.1",
                "--reps",
                "8",
                "--seed",
                "11",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        out
    };

    for (name, template, outputs) in &commands {
        let mut digests: Vec<Vec<String>> = Vec::new();
        for run in 0..2 {
            let run_dir = root.join(format!("{name}-{run}"));
            fs::create_dir_all(&run_dir).unwrap();
            let prep_file = prep(&run_dir);
            let out_file = run_dir.join(outputs[0]);
            let args: Vec<String> = template
                .iter()
                .map(|a| match a.as_str() {
                    "OUT" => out_file.display().to_string(),
                    "PREP" => prep_file.display().to_string(),
                    other => other.to_string(),
                })
                .collect();
            let output = Command::new(bin).args(&args).output().unwrap();
            assert!(
                output.status.success(),
                "{name} run {run} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
            let mut hashes = Vec::new();
            for file in outputs {
                let path = run_dir.join(file);
                let bytes = fs::read(&path)
                    .unwrap_or_else(|e| panic!("{name}: missing output {}: {e}", path.display()));
                // Sidecars echo absolute paths; normalize the run directory out.
                let text =
                    String::from_utf8_lossy(&bytes).replace(run_dir.to_str().unwrap(), "RUNDIR");
                use sha2::Digest;
                hashes.push(format!("{:x}", sha2::Sha256::digest(text.as_bytes())));
            }
            digests.push(hashes);
        }
        assert_eq!(
            digests[0], digests[1],
            "{name}: outputs differ between identical runs"
        );
    }

    report(
        9,
        start,
        Duration::from_secs(60),
        "all commands byte-identical across repeated runs",
    );
}
