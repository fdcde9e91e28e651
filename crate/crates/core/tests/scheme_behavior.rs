//! Desk-scale convergence behavior: observed orders on small grids, scheme
//! exactness on affinely forced problems, and stability of the fitted order
//! under reference refinement.

use exprk_core::{
    integrate, make_initial_data, run_convergence_study, Grid, InitialData, NormKind, Problem,
    Reference, Scheme, SpectralOperator,
};

fn dyadic_taus(t_end: f64, ks: std::ops::RangeInclusive<u32>) -> Vec<f64> {
    ks.map(|k| t_end / f64::powi(2.0, k as i32)).collect()
}

#[test]
fn euler_is_first_order_on_reaction_diffusion() {
    let g = Grid::line(16).unwrap();
    let u0 = make_initial_data(InitialData::Hat, &g).unwrap();
    let p = Problem::allen_cahn(g, 0.3f64, u0).unwrap();
    let report = run_convergence_study(
        &p,
        Scheme::ExpEuler,
        &dyadic_taus(0.5, 2..=7),
        0.5,
        &[NormKind::Max],
        Reference::FineStep { scheme: Scheme::Erk2 { c2: 0.5 }, refine: 32 },
    )
    .unwrap();
    assert!(!report.any_diverged());
    let fit = report.fits[0].expect("fit");
    assert!((0.8..=1.15).contains(&fit.p), "p = {}", fit.p);
    assert!(fit.r2 > 0.995, "r2 = {}", fit.r2);
}

#[test]
fn two_stage_scheme_is_second_order_on_smooth_data() {
    let g = Grid::line(16).unwrap();
    let u0 = make_initial_data(InitialData::SmoothCompatible, &g).unwrap();
    let p = Problem::allen_cahn(g, 0.3f64, u0).unwrap();
    let report = run_convergence_study(
        &p,
        Scheme::Erk2 { c2: 0.5 },
        &dyadic_taus(0.5, 2..=7),
        0.5,
        &[NormKind::Max],
        Reference::FineStep { scheme: Scheme::Erk2 { c2: 0.5 }, refine: 32 },
    )
    .unwrap();
    let fit = report.fits[0].expect("fit");
    assert!((1.6..=2.2).contains(&fit.p), "p = {}", fit.p);
}

#[test]
fn split_schemes_converge_on_a_2d_problem() {
    let g = Grid::square(16).unwrap();
    let u0 = make_initial_data(InitialData::Pyramid, &g).unwrap();
    let p = Problem::allen_cahn(g, 0.25f64, u0).unwrap();
    let taus = dyadic_taus(0.25, 2..=6);
    let ref_spec = Reference::FineStep { scheme: Scheme::Erk2 { c2: 0.5 }, refine: 32 };

    let euler = run_convergence_study(
        &p,
        Scheme::SplitEuler,
        &taus,
        0.25,
        &[NormKind::Max],
        ref_spec,
    )
    .unwrap();
    let fit = euler.fits[0].expect("fit");
    assert!((0.7..=1.25).contains(&fit.p), "split euler p = {}", fit.p);

    let u0s = make_initial_data(InitialData::SmoothCompatible, &g).unwrap();
    let ps = Problem::allen_cahn(g, 0.25f64, u0s).unwrap();
    let second = run_convergence_study(
        &ps,
        Scheme::Erk2L { c2: 0.5 },
        &taus,
        0.25,
        &[NormKind::Max],
        ref_spec,
    )
    .unwrap();
    let fit2 = second.fits[0].expect("fit");
    assert!((1.6..=2.2).contains(&fit2.p), "erk2l p = {}", fit2.p);
}

#[test]
fn second_order_schemes_are_exact_under_affine_forcing() {
    // f(t) = g0 + t g1 makes every two-stage run land on the closed form,
    // step size notwithstanding
    let op = SpectralOperator::laplacian_1d(Grid::line(16).unwrap(), 0.5f64).unwrap();
    let n = op.len();
    let u0: Vec<f64> = (0..n).map(|i| ((i + 1) as f64 * 0.2).sin()).collect();
    let g0: Vec<f64> = (0..n).map(|i| 0.3 + 0.01 * i as f64).collect();
    let g1: Vec<f64> = (0..n).map(|i| -0.2 + 0.02 * i as f64).collect();
    let p = Problem::linear_forced(op, u0, g0, g1).unwrap();
    let want = p.exact_at(1.0).unwrap();
    for tau in [0.5f64, 0.25, 0.125] {
        let got = integrate(Scheme::Erk2 { c2: 0.5 }, &p, tau, 1.0).unwrap();
        let err = got
            .iter()
            .zip(&want)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-12, "tau={tau}: err {err:.3e}");
    }
}

#[test]
fn fitted_order_is_stable_under_reference_refinement() {
    let g = Grid::line(16).unwrap();
    let u0 = make_initial_data(InitialData::Hat, &g).unwrap();
    let p = Problem::allen_cahn(g, 0.3f64, u0).unwrap();
    let taus = dyadic_taus(0.5, 2..=7);
    let run = |refine: usize| {
        run_convergence_study(
            &p,
            Scheme::ExpEuler,
            &taus,
            0.5,
            &[NormKind::Max],
            Reference::FineStep { scheme: Scheme::Erk2 { c2: 0.5 }, refine },
        )
        .unwrap()
        .fits[0]
            .expect("fit")
            .p
    };
    let coarse = run(8);
    let fine = run(16);
    assert!(
        (coarse - fine).abs() <= 0.10 * fine.abs(),
        "p(r=8) = {coarse}, p(r=16) = {fine}"
    );
}

#[test]
fn studies_are_deterministic_end_to_end() {
    let g = Grid::square(12).unwrap();
    let u0 = make_initial_data(InitialData::FourierDecay { smoothness: 0.5, seed: 9 }, &g).unwrap();
    let p = Problem::allen_cahn(g, 0.2f64, u0).unwrap();
    let taus = dyadic_taus(0.25, 2..=5);
    let norms = [NormKind::Max, NormKind::C1Discrete];
    let ref_spec = Reference::FineStep { scheme: Scheme::ExpEuler, refine: 4 };
    let a = run_convergence_study(&p, Scheme::SplitEuler, &taus, 0.25, &norms, ref_spec).unwrap();
    let b = run_convergence_study(&p, Scheme::SplitEuler, &taus, 0.25, &norms, ref_spec).unwrap();
    for (pa, pb) in a.points.iter().zip(&b.points) {
        assert_eq!(pa.errors, pb.errors);
    }
    assert_eq!(
        a.fits[0].map(|f| f.p.to_bits()),
        b.fits[0].map(|f| f.p.to_bits())
    );
}
