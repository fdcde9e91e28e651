//! Measurement machinery: grid norms, least-squares order fits, convergence
//! studies against exact or fine-step references, and the study of how far
//! the product of split phi functions sits from the phi function of the sum.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::operators::{gradient_1d, gradient_2d, Grid, SplitOperator};
use crate::phi::{phi_scalar, FACT, K_MAX};
use crate::problems::Problem;
use crate::scalar::Real;
use crate::stepper::{integrate, Scheme};

/// Errors at or below this are treated as roundoff noise, not data.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Grid norms. All of them dominate the plain sup norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    /// sup_i |v_i|.
    Max,
    /// sup |v| + the larger directional sup of the centered gradient.
    C1Discrete,
    /// sup |v| + sup |v_i - v_j| / dist(i,j)^exponent over node pairs: every
    /// adjacent pair plus `pairs` seeded random ones. Only interior nodes
    /// enter; quotients against the zero boundary are not formed.
    Holder { exponent: f64, pairs: usize, seed: u64 },
}

impl NormKind {
    pub fn label(&self) -> String {
        match self {
            NormKind::Max => "max".into(),
            NormKind::C1Discrete => "c1".into(),
            NormKind::Holder { exponent, .. } => format!("holder{exponent}"),
        }
    }
}

fn sup_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

pub fn norm<T: Real>(kind: NormKind, grid: &Grid, v: &[T]) -> Result<T> {
    if v.len() != grid.total() {
        return Err(Error::ShapeMismatch { expected: grid.total(), got: v.len() });
    }
    match kind {
        NormKind::Max => Ok(sup_norm(v)),
        NormKind::C1Discrete => {
            let grad_sup = match grid.dims() {
                1 => sup_norm(&gradient_1d(grid, v)?),
                _ => {
                    let (dx, dy) = gradient_2d(grid, v)?;
                    sup_norm(&dx).max(sup_norm(&dy))
                }
            };
            Ok(sup_norm(v) + grad_sup)
        }
        NormKind::Holder { exponent, pairs, seed } => {
            if !(exponent > 0.0 && exponent < 2.0) {
                return Err(Error::invalid(format!(
                    "difference-quotient exponent must lie in (0, 2), got {exponent}"
                )));
            }
            let total = grid.total();
            let alpha = T::of(exponent);
            let mut semi = T::zero();
            let mut consider = |i: usize, j: usize| {
                let (xi, yi) = grid.node::<T>(i);
                let (xj, yj) = grid.node::<T>(j);
                let dist = ((xi - xj) * (xi - xj) + (yi - yj) * (yi - yj)).sqrt();
                let q = (v[i] - v[j]).abs() / dist.powf(alpha);
                semi = semi.max(q);
            };
            match grid.dims() {
                1 => {
                    for i in 0..total.saturating_sub(1) {
                        consider(i, i + 1);
                    }
                }
                _ => {
                    let n = grid.interior();
                    for iy in 0..n {
                        for ix in 0..n {
                            let idx = iy * n + ix;
                            if ix + 1 < n {
                                consider(idx, idx + 1);
                            }
                            if iy + 1 < n {
                                consider(idx, idx + n);
                            }
                        }
                    }
                }
            }
            if total > 1 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..pairs {
                    let i = rng.random_range(0..total);
                    let mut j = rng.random_range(0..total);
                    while j == i {
                        j = rng.random_range(0..total);
                    }
                    consider(i, j);
                }
            }
            Ok(sup_norm(v) + semi)
        }
    }
}

/// Slope of log(error) against log(step), with the fit quality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderFit {
    pub p: f64,
    pub r2: f64,
    pub points_used: usize,
    /// Some points were dropped for sitting at roundoff level.
    pub noise_floor: bool,
}

/// Least-squares slope through (log tau, log error). Points with error at or
/// below NOISE_FLOOR are excluded and flagged; fewer than three surviving
/// points is an error.
pub fn fit_order<T: Real>(points: &[(T, T)]) -> Result<OrderFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut noise_floor = false;
    for &(tau, err) in points {
        let tau = tau.as_f64();
        let err = err.as_f64();
        if !(tau > 0.0 && tau.is_finite() && err.is_finite() && err >= 0.0) {
            return Err(Error::invalid(format!("fit needs finite tau > 0 and error >= 0, got ({tau}, {err})")));
        }
        if err <= NOISE_FLOOR {
            noise_floor = true;
            continue;
        }
        xs.push(tau.ln());
        ys.push(err.ln());
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "order fit needs at least 3 usable points, got {n}"
        )));
    }
    let nf = n as f64;
    let xbar = xs.iter().sum::<f64>() / nf;
    let ybar = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
        syy += (y - ybar) * (y - ybar);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all fit points share one step size".into()));
    }
    let p = sxy / sxx;
    let ss_res = (syy - p * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(OrderFit { p, r2, points_used: n, noise_floor })
}

/// What the study measures errors against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reference {
    /// The closed-form solution; only for problems that have one.
    Exact,
    /// The same problem integrated with `scheme` at tau_min / refine.
    FineStep { scheme: Scheme, refine: usize },
}

impl Reference {
    pub fn label(&self) -> String {
        match self {
            Reference::Exact => "exact".into(),
            Reference::FineStep { scheme, refine } => {
                format!("fine_step({}, refine={refine})", scheme.label())
            }
        }
    }
}

/// One step size's outcome inside a study.
#[derive(Clone, Debug)]
pub struct StudyPoint<T> {
    pub tau: T,
    /// One entry per requested norm; None when the run diverged.
    pub errors: Vec<Option<T>>,
    pub wall_ms: f64,
    pub diverged: bool,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport<T> {
    pub problem: String,
    pub scheme: String,
    pub reference: String,
    pub t_end: T,
    pub norms: Vec<NormKind>,
    /// Sorted by decreasing step size.
    pub points: Vec<StudyPoint<T>>,
    /// One fit per norm; None when too few points survived.
    pub fits: Vec<Option<OrderFit>>,
}

impl<T> ConvergenceReport<T> {
    pub fn any_diverged(&self) -> bool {
        self.points.iter().any(|p| p.diverged)
    }
}

/// Integrate the problem at every step size, measure errors against the
/// reference at t_end in every norm, and fit observed orders. Diverged step
/// sizes are recorded and excluded from the fits rather than failing the
/// study; any other failure aborts it.
pub fn run_convergence_study<T: Real>(
    problem: &Problem<T>,
    scheme: Scheme,
    taus: &[T],
    t_end: T,
    norms: &[NormKind],
    reference: Reference,
) -> Result<ConvergenceReport<T>> {
    if taus.is_empty() {
        return Err(Error::invalid("study needs at least one step size"));
    }
    if norms.is_empty() {
        return Err(Error::invalid("study needs at least one norm"));
    }
    for &tau in taus {
        if !tau.is_finite() || tau <= T::zero() {
            return Err(Error::invalid(format!("step sizes must be positive, got {tau}")));
        }
    }
    let mut taus = taus.to_vec();
    taus.sort_by(|a, b| b.partial_cmp(a).expect("finite by validation"));
    taus.dedup();

    let reference_state = match reference {
        Reference::Exact => problem.exact_at(t_end)?,
        Reference::FineStep { scheme: ref_scheme, refine } => {
            if refine < 2 {
                return Err(Error::invalid(format!(
                    "reference refinement must be at least 2, got {refine}"
                )));
            }
            let tau_min = *taus.last().expect("nonempty");
            integrate(ref_scheme, problem, tau_min / T::of_usize(refine), t_end)?
        }
    };

    let grid = *problem.grid();
    let points: Vec<StudyPoint<T>> = taus
        .par_iter()
        .map(|&tau| -> Result<StudyPoint<T>> {
            let start = Instant::now();
            match integrate(scheme, problem, tau, t_end) {
                Ok(u) => {
                    let diff: Vec<T> =
                        u.iter().zip(&reference_state).map(|(a, b)| *a - *b).collect();
                    let mut errors = Vec::with_capacity(norms.len());
                    for &kind in norms {
                        errors.push(Some(norm(kind, &grid, &diff)?));
                    }
                    Ok(StudyPoint {
                        tau,
                        errors,
                        wall_ms: start.elapsed().as_secs_f64() * 1e3,
                        diverged: false,
                    })
                }
                Err(Error::Divergence { .. }) => Ok(StudyPoint {
                    tau,
                    errors: vec![None; norms.len()],
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                    diverged: true,
                }),
                Err(other) => Err(other),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let fits = (0..norms.len())
        .map(|ni| {
            let usable: Vec<(T, T)> = points
                .iter()
                .filter_map(|p| p.errors[ni].map(|e| (p.tau, e)))
                .collect();
            fit_order(&usable).ok()
        })
        .collect();

    Ok(ConvergenceReport {
        problem: problem.label().to_string(),
        scheme: scheme.label(),
        reference: reference.label(),
        t_end,
        norms: norms.to_vec(),
        points,
        fits,
    })
}

/// phi_k(z) - k! phi_k(z1) phi_k(z2), the per-mode gap between the phi
/// function of the sum and the normalized product over the parts.
pub fn split_defect_multiplier<T: Real>(k: usize, z: T, z1: T, z2: T) -> Result<T> {
    if k == 0 || k > K_MAX {
        return Err(Error::invalid(format!("defect order must be 1..={K_MAX}, got {k}")));
    }
    Ok(phi_scalar(k, z)? - T::of(FACT[k]) * phi_scalar(k, z1)? * phi_scalar(k, z2)?)
}

#[derive(Clone, Debug)]
pub struct DefectReport<T> {
    pub k: usize,
    /// Regularity label of the probe data, carried through for reporting.
    pub beta1: Option<f64>,
    pub ts: Vec<T>,
    /// Sup norm of the defect operator applied to the probe vector, relative
    /// to the sup norm of the probe itself.
    pub defects: Vec<T>,
    /// Fit of log(defect) against log(t); None with fewer than 3 times.
    pub fit: Option<OrderFit>,
}

/// Measure t -> ||(phi_k(tA) - k! phi_k(tA1) phi_k(tA2)) v||_sup / ||v||_sup
/// across the given times. All three operators share one eigenbasis, so the
/// defect is a single multiplier per mode.
pub fn split_defect_study<T: Real>(
    k: usize,
    split: &SplitOperator<T>,
    v: &[T],
    beta1: Option<f64>,
    ts: &[T],
) -> Result<DefectReport<T>> {
    if ts.is_empty() {
        return Err(Error::invalid("defect study needs at least one time"));
    }
    for &t in ts {
        if !t.is_finite() || t <= T::zero() {
            return Err(Error::invalid(format!("defect times must be positive, got {t}")));
        }
    }
    let scale = sup_norm(v);
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::invalid("defect probe vector must be nonzero and finite"));
    }
    let op = split.full();
    let mut ts = ts.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite by validation"));
    ts.dedup();
    let modes = op.to_modes(v)?;
    let lam = op.eigenvalues();
    let lam1 = split.first().eigenvalues();
    let lam2 = split.second().eigenvalues();
    let mut defects = Vec::with_capacity(ts.len());
    for &t in &ts {
        let mut w = modes.clone();
        for (m, wm) in w.iter_mut().enumerate() {
            let d = split_defect_multiplier(k, t * lam[m], t * lam1[m], t * lam2[m])?;
            *wm = *wm * d;
        }
        let nodal = op.from_modes(&w)?;
        defects.push(sup_norm(&nodal) / scale);
    }
    let fit_points: Vec<(T, T)> = ts.iter().copied().zip(defects.iter().copied()).collect();
    let fit = fit_order(&fit_points).ok();
    Ok(DefectReport { k, beta1, ts, defects, fit })
}
