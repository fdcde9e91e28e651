//! The acceptance gate: one test per shipped claim, each asserting the
//! stated tolerance or rate band and its wall-clock budget. Every test is
//! independent and uses the library directly, except the reproducibility
//! check, which drives the installed binary over every shipped config.

use std::path::{Path, PathBuf};
use std::time::Instant;

use exprk_core::dense::phi_dense;
use exprk_core::{
    apply_spectral, make_initial_data, phi_quadrature_oracle, phi_scalar, run_convergence_study,
    split_defect_study, ExpRkTableau, Grid, InitialData, NormKind, Problem, Reference, Scheme,
    SpectralOperator, SplitOperator, SplitTableau, K_MAX,
};

fn assert_budget(start: Instant, seconds: f64, label: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < seconds,
        "{label}: took {elapsed:.1} s, budget {seconds} s"
    );
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// 120 log-spaced magnitudes over [1e-3, 1e2] (negated) plus 80 linear
/// points across [-2.5, 5]: 200 arguments covering the deep-decay tail,
/// the series/squaring handoff, and moderate positive arguments.
fn sweep_args() -> Vec<f64> {
    let mut zs = Vec::with_capacity(200);
    for j in 0..120 {
        let e = 2.0 - 5.0 * (j as f64) / 119.0;
        zs.push(-(10.0f64.powf(e)));
    }
    for j in 0..80 {
        zs.push(-2.5 + 7.5 * (j as f64) / 79.0);
    }
    zs
}

#[test]
fn criterion_01_phi_accuracy_against_quadrature() {
    let start = Instant::now();
    let zs = sweep_args();
    assert_eq!(zs.len(), 200);
    for k in 1..=4usize {
        for &z in &zs {
            let phi = phi_scalar(k, z).unwrap();
            let oracle = phi_quadrature_oracle(k, z, 1e-13).unwrap();
            let rel = (phi - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
            assert!(rel <= 1e-10, "k={k} z={z}: rel err {rel:e}");
        }
    }
    // continuity through zero at |z| <= 1e-6
    for k in 1..=K_MAX {
        let at_zero = phi_scalar(k, 0.0).unwrap();
        for &z in &[1e-6f64, -1e-6, 1e-9, -1e-9] {
            let gap = (phi_scalar(k, z).unwrap() - at_zero).abs();
            assert!(gap <= 1e-5, "k={k} z={z}: jump {gap:e} near zero");
        }
    }
    assert_budget(start, 5.0, "phi accuracy");
}

#[test]
fn criterion_02_order_condition_residuals() {
    let start = Instant::now();
    let zs: Vec<f64> = (0..50).map(|j| -100.0 * (j as f64) / 49.0).collect();
    let unsplit = [ExpRkTableau::<f64>::exp_euler(), ExpRkTableau::erk2(0.5).unwrap()];
    for tab in &unsplit {
        let report = tab.check_order_conditions_at(&zs).unwrap();
        assert!(
            report.max_residual() <= 1e-12,
            "{}: residual {:e}",
            report.label,
            report.max_residual()
        );
    }
    let split = [SplitTableau::<f64>::split_euler(), SplitTableau::erk2l(0.5).unwrap()];
    for tab in &split {
        let report = tab.check_order_conditions_at(&zs).unwrap();
        assert!(
            report.max_residual() <= 1e-12,
            "{}: residual {:e}",
            report.label,
            report.max_residual()
        );
    }
    assert_budget(start, 1.0, "order conditions");
}

#[test]
fn criterion_03_exactness_on_linear_problems() {
    let start = Instant::now();

    // the closed forms behind the scalar checks
    let e1 = (-1.0f64).exp();
    assert!((phi_scalar(1, -1.0).unwrap() - (1.0 - e1)).abs() <= 1e-15);
    assert!((phi_scalar(2, -1.0).unwrap() - e1).abs() <= 1e-15);

    // one-stage scheme, constant forcing: exact at every step size
    let grid = Grid::line(16).unwrap();
    let op = SpectralOperator::laplacian_1d(grid, 0.3).unwrap();
    let n = op.len();
    let u0: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 / 11.0 - 0.4).collect();
    let g0: Vec<f64> = (0..n).map(|i| ((i * 5 + 1) % 13) as f64 / 13.0 - 0.5).collect();
    let zero = vec![0.0; n];
    let constant = Problem::linear_forced(op.clone(), u0.clone(), g0.clone(), zero).unwrap();
    for tau in [0.5, 0.25, 0.125] {
        let u = exprk_core::integrate(Scheme::ExpEuler, &constant, tau, 1.0).unwrap();
        let exact = constant.exact_at(1.0).unwrap();
        assert!(
            sup_diff(&u, &exact) <= 1e-12,
            "expeuler constant forcing tau={tau}: {:e}",
            sup_diff(&u, &exact)
        );
    }

    // two-stage scheme, affine forcing: exact as well
    let g1: Vec<f64> = (0..n).map(|i| ((i * 3 + 5) % 7) as f64 / 7.0 - 0.5).collect();
    let affine = Problem::linear_forced(op, u0, g0, g1).unwrap();
    for tau in [0.5, 0.25, 0.125] {
        let u = exprk_core::integrate(Scheme::Erk2 { c2: 0.5 }, &affine, tau, 1.0).unwrap();
        let exact = affine.exact_at(1.0).unwrap();
        assert!(
            sup_diff(&u, &exact) <= 1e-11,
            "erk2 affine forcing tau={tau}: {:e}",
            sup_diff(&u, &exact)
        );
    }

    // scalar recursion oracle: A = -1, g(t) = t, u0 = 0 gives u(1) = phi_2(-1)
    let scalar = Problem::linear_forced(
        SpectralOperator::diagonal(vec![-1.0]).unwrap(),
        vec![0.0],
        vec![0.0],
        vec![1.0],
    )
    .unwrap();
    let u = exprk_core::integrate(Scheme::Erk2 { c2: 0.5 }, &scalar, 1.0, 1.0).unwrap();
    assert!((u[0] - e1).abs() <= 1e-11, "one-step affine: {} vs {e1}", u[0]);

    assert_budget(start, 1.0, "exactness");
}

#[test]
fn criterion_04_backend_equivalence() {
    let start = Instant::now();

    let cases: Vec<SpectralOperator<f64>> = vec![
        SpectralOperator::laplacian_1d(Grid::line(64).unwrap(), 0.02).unwrap(),
        SpectralOperator::laplacian_2d(Grid::square(8).unwrap(), 0.1).unwrap(),
        SpectralOperator::diagonal(vec![-40.0, -3.0, -0.2, 0.0, 0.5]).unwrap(),
    ];
    for op in &cases {
        let n = op.len();
        assert!(n <= 64);
        let v: Vec<f64> = (0..n).map(|i| (0.37 * (i as f64 + 1.0)).sin()).collect();
        let a = op.dense_matrix().unwrap();
        for k in 0..=4usize {
            for &t in &[0.01, 0.5] {
                let spectral = apply_spectral(k, t, op, &v).unwrap();
                let dense_mat = phi_dense(k, t, &a).unwrap();
                let mut dense = vec![0.0f64; n];
                for (row, slot) in dense.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for col in 0..n {
                        acc += dense_mat[(row, col)] * v[col];
                    }
                    *slot = acc;
                }
                let scale = sup(&spectral).max(1e-300);
                let diff = sup_diff(&spectral, &dense) / scale;
                assert!(diff <= 1e-10, "{} k={k} t={t}: rel gap {diff:e}", op.label());
            }
        }
    }

    // the split semigroup factorizes exactly on the axis-split diffusion
    let split = SplitOperator::laplacian_2d(Grid::square(16).unwrap(), 0.1).unwrap();
    let n = split.full().len();
    let v: Vec<f64> = (0..n).map(|i| (0.11 * (i as f64) - 0.3).cos()).collect();
    for &t in &[0.004, 0.0625, 1.0] {
        let unsplit = apply_spectral(0, t, split.full(), &v).unwrap();
        let second = apply_spectral(0, t, split.second(), &v).unwrap();
        let stepped = apply_spectral(0, t, split.first(), &second).unwrap();
        assert!(
            sup_diff(&unsplit, &stepped) <= 1e-11,
            "split step t={t}: gap {:e}",
            sup_diff(&unsplit, &stepped)
        );
    }

    assert_budget(start, 10.0, "backend equivalence");
}

fn allen_cahn_64(data: InitialData) -> Problem<f64> {
    let grid = Grid::square(64).unwrap();
    let u0 = make_initial_data(data, &grid).unwrap();
    Problem::allen_cahn(grid, 0.1, u0).unwrap()
}

fn spec_taus() -> Vec<f64> {
    // T 2^-k for k = 2..8 with T = 0.1
    (2..=8).map(|k| 0.1 * f64::powi(2.0, -k)).collect()
}

fn erk2_reference() -> Reference {
    Reference::FineStep { scheme: Scheme::Erk2 { c2: 0.5 }, refine: 32 }
}

fn fitted_max_order(problem: &Problem<f64>, scheme: Scheme) -> f64 {
    let report = run_convergence_study(
        problem,
        scheme,
        &spec_taus(),
        0.1,
        &[NormKind::Max],
        erk2_reference(),
    )
    .unwrap();
    assert!(!report.any_diverged(), "{} diverged", report.scheme);
    report.fits[0].as_ref().expect("fit must exist").p
}

#[test]
fn criterion_05_first_order_rate_on_nonsmooth_data() {
    let problem = allen_cahn_64(InitialData::Pyramid);

    let start = Instant::now();
    let p = fitted_max_order(&problem, Scheme::ExpEuler);
    assert_budget(start, 60.0, "expeuler study");
    assert!((0.80..=1.15).contains(&p), "expeuler fitted order {p:.4}");

    let start = Instant::now();
    let p = fitted_max_order(&problem, Scheme::SplitEuler);
    assert_budget(start, 60.0, "split euler study");
    assert!((0.80..=1.15).contains(&p), "split euler fitted order {p:.4}");
}

#[test]
fn criterion_06_second_order_needs_compatibility() {
    let start = Instant::now();

    let smooth = allen_cahn_64(InitialData::SmoothCompatible);
    let p_erk2 = fitted_max_order(&smooth, Scheme::Erk2 { c2: 0.5 });
    assert!(
        (1.70..=2.15).contains(&p_erk2),
        "erk2 on compatible data fitted order {p_erk2:.4}"
    );
    let p_erk2l = fitted_max_order(&smooth, Scheme::Erk2L { c2: 0.5 });
    assert!(
        (1.70..=2.15).contains(&p_erk2l),
        "erk2l on compatible data fitted order {p_erk2l:.4}"
    );

    let rough = allen_cahn_64(InitialData::Pyramid);
    let p_reduced = fitted_max_order(&rough, Scheme::Erk2 { c2: 0.5 });
    assert!(
        p_reduced < 1.4,
        "erk2 on pyramid data fitted order {p_reduced:.4}, expected visible order reduction"
    );

    assert_budget(start, 90.0, "second order studies");
}

#[test]
fn criterion_07_split_defect_decay() {
    let start = Instant::now();

    // scalar closed forms at t = 1, both rates -1
    let pair = SplitOperator::diagonal(vec![-1.0], vec![-1.0]).unwrap();
    let e1 = (-1.0f64).exp();
    let e2 = (-2.0f64).exp();
    let d1_true = (1.0 - e2) / 2.0 - (1.0 - e1) * (1.0 - e1);
    let d2_true = (1.0 - 7.0 * e2) / 4.0;
    for (k, want) in [(1usize, d1_true), (2, d2_true)] {
        let report = split_defect_study(k, &pair, &[1.0], None, &[1.0]).unwrap();
        let got = report.defects[0];
        assert!(
            (got - want).abs() <= 1e-12,
            "scalar defect k={k}: got {got:.17}, want {want:.17}"
        );
    }

    // smooth probe: near-linear decay
    let grid = Grid::square(32).unwrap();
    let split = SplitOperator::laplacian_2d(grid, 1.0).unwrap();
    let ts: Vec<f64> = (1..=8).map(|j| f64::powi(2.0, -j)).collect();
    let smooth: Vec<f64> = make_initial_data(InitialData::SmoothCompatible, &grid).unwrap();
    let report = split_defect_study(1, &split, &smooth, None, &ts).unwrap();
    let slope = report.fit.as_ref().expect("slope fit").p;
    assert!(slope >= 0.85, "smooth defect slope {slope:.4}");

    // rough probes: decay at least as fast as the regularity index implies
    for (beta1, seed, floor) in [(0.25, 7u64, 0.10), (0.5, 8, 0.35)] {
        let probe: Vec<f64> =
            make_initial_data(InitialData::FourierDecay { smoothness: beta1, seed }, &grid)
                .unwrap();
        let report = split_defect_study(1, &split, &probe, Some(beta1), &ts).unwrap();
        let slope = report.fit.as_ref().expect("slope fit").p;
        assert!(
            slope >= floor,
            "rough defect beta1={beta1}: slope {slope:.4}, floor {floor}"
        );
    }

    assert_budget(start, 30.0, "defect decay");
}

#[test]
fn criterion_08_burgers_rates() {
    let start = Instant::now();
    let grid = Grid::square(64).unwrap();

    let rough: Vec<f64> =
        make_initial_data(InitialData::FourierDecay { smoothness: 0.5, seed: 0 }, &grid).unwrap();
    let problem = Problem::burgers(grid, 0.05, rough).unwrap();
    let report = run_convergence_study(
        &problem,
        Scheme::ExpEuler,
        &spec_taus(),
        0.1,
        &[NormKind::C1Discrete],
        erk2_reference(),
    )
    .unwrap();
    assert!(!report.any_diverged());
    let p = report.fits[0].as_ref().expect("fit").p;
    assert!(p >= 0.40, "rough data c1 fitted order {p:.4}");

    let smooth: Vec<f64> = make_initial_data(InitialData::SmoothCompatible, &grid).unwrap();
    let problem = Problem::burgers(grid, 0.05, smooth).unwrap();
    let report = run_convergence_study(
        &problem,
        Scheme::Erk2L { c2: 0.5 },
        &spec_taus(),
        0.1,
        &[NormKind::Max],
        erk2_reference(),
    )
    .unwrap();
    assert!(!report.any_diverged());
    let p = report.fits[0].as_ref().expect("fit").p;
    assert!(p >= 1.6, "smooth data max fitted order {p:.4}");

    assert_budget(start, 120.0, "burgers rates");
}

#[test]
fn criterion_09_error_constants_uniform_in_stiffness() {
    let start = Instant::now();
    let mut tables = Vec::new();
    for n in [64usize, 128] {
        let grid = Grid::square(n).unwrap();
        let u0 = make_initial_data(InitialData::Pyramid, &grid).unwrap();
        let problem = Problem::allen_cahn(grid, 0.1, u0).unwrap();
        let report = run_convergence_study(
            &problem,
            Scheme::ExpEuler,
            &spec_taus(),
            0.1,
            &[NormKind::Max],
            erk2_reference(),
        )
        .unwrap();
        assert!(!report.any_diverged());
        let errors: Vec<f64> = report
            .points
            .iter()
            .map(|pt| pt.errors[0].expect("error present"))
            .collect();
        tables.push(errors);
    }
    for (i, (a, b)) in tables[0].iter().zip(&tables[1]).enumerate() {
        let ratio = a / b;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "entry {i}: errors {a:e} vs {b:e}, ratio {ratio:.3}"
        );
    }
    assert_budget(start, 120.0, "stiffness uniformity");
}

fn shipped_configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "no shipped configs found");
    paths
}

fn subcommand_for(config: &Path) -> &'static str {
    let text = std::fs::read_to_string(config).unwrap();
    if text.contains("[defect]") {
        "defect"
    } else if text.contains("[solve]") {
        "solve"
    } else {
        "converge"
    }
}

#[test]
fn criterion_10_repeat_runs_are_byte_identical() {
    let tmp = Path::new(env!("CARGO_TARGET_TMPDIR")).join("repro");
    for config in shipped_configs() {
        let name = config.file_stem().unwrap().to_str().unwrap().to_string();
        let sub = subcommand_for(&config);
        let mut dirs = Vec::new();
        for round in ["a", "b"] {
            let out_dir = tmp.join(format!("{name}_{round}"));
            std::fs::create_dir_all(&out_dir).unwrap();
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_exprk"))
                .env_remove("EXPRK_OUT_DIR")
                .args([sub, "--config", config.to_str().unwrap()])
                .args(["--out", out_dir.to_str().unwrap()])
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "{name} round {round}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            dirs.push(out_dir);
        }
        let mut names: Vec<String> = std::fs::read_dir(&dirs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|f| f != "timing.csv")
            .collect();
        names.sort();
        assert!(!names.is_empty(), "{name}: no outputs");
        for file in &names {
            let a = std::fs::read(dirs[0].join(file)).unwrap();
            let b = std::fs::read(dirs[1].join(file)).unwrap();
            assert_eq!(a, b, "{name}/{file} differs between runs");
        }
    }
}
