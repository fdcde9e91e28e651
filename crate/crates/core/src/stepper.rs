//! Time stepping. A scheme plus a problem plus a step size turn into
//! per-mode multiplier tables once, then every step is a fixed dance of
//! transforms, pointwise multiplies, and nonlinearity evaluations: 2s + 1
//! transforms for an s-stage scheme with an explicit first stage.

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::scalar::Real;
use crate::tableau::{ExpRkTableau, SplitTableau};

/// Max-norm ceiling beyond which a run is declared diverged.
const DIVERGENCE_CAP: f64 = 1e8;

/// Relative slack when checking that the step divides the final time.
const STEP_FIT_TOL: f64 = 1e-9;

/// The four shipped one-step maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    /// Exponential Euler.
    ExpEuler,
    /// Two-stage second-order family, abscissa c2.
    Erk2 { c2: f64 },
    /// Exponential Euler with the propagator and weight split into the
    /// ordered product over the two operator parts.
    SplitEuler,
    /// The two-stage family with every weight in split product form.
    Erk2L { c2: f64 },
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::ExpEuler => "expeuler".into(),
            Scheme::Erk2 { c2 } => format!("erk2(c2={c2})"),
            Scheme::SplitEuler => "split_euler".into(),
            Scheme::Erk2L { c2 } => format!("erk2l(c2={c2})"),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Scheme::ExpEuler | Scheme::SplitEuler => 1,
            Scheme::Erk2 { .. } | Scheme::Erk2L { .. } => 2,
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self, Scheme::SplitEuler | Scheme::Erk2L { .. })
    }
}

/// Everything one step needs, already evaluated per mode with the step size
/// folded into the coupling weights.
struct ModeWeights<T> {
    c: Vec<T>,
    /// props[i][m] = propagator from t_n to t_n + c_i tau on mode m.
    props: Vec<Vec<T>>,
    final_prop: Vec<T>,
    /// a[i][j][m] = tau * a_ij(tau lambda_m), j < i.
    a: Vec<Vec<Vec<T>>>,
    /// b[i][m] = tau * b_i(tau lambda_m).
    b: Vec<Vec<T>>,
    /// First stage is the current value itself (c_1 = 0, no couplings).
    first_is_current: bool,
}

fn weights_unsplit<T: Real>(
    tab: &ExpRkTableau<T>,
    eig: &[T],
    tau: T,
) -> Result<ModeWeights<T>> {
    let s = tab.stages();
    let n = eig.len();
    let mut props = vec![vec![T::zero(); n]; s];
    let mut final_prop = vec![T::zero(); n];
    let mut a = vec![Vec::new(); s];
    let mut b = vec![vec![T::zero(); n]; s];
    for (i, row) in tab.a().iter().enumerate() {
        a[i] = vec![vec![T::zero(); n]; row.len()];
    }
    for (m, &lam) in eig.iter().enumerate() {
        let z = tau * lam;
        for i in 0..s {
            props[i][m] = (tab.c()[i] * z).exp();
            b[i][m] = tau * tab.b()[i].eval(z)?;
            for (j, aij) in tab.a()[i].iter().enumerate() {
                a[i][j][m] = tau * aij.eval(z)?;
            }
        }
        final_prop[m] = z.exp();
    }
    Ok(ModeWeights {
        c: tab.c().to_vec(),
        props,
        final_prop,
        a,
        b,
        first_is_current: tab.c()[0] == T::zero() && tab.a()[0].is_empty(),
    })
}

fn weights_split<T: Real>(
    tab: &SplitTableau<T>,
    eig1: &[T],
    eig2: &[T],
    tau: T,
) -> Result<ModeWeights<T>> {
    let s = tab.stages();
    let n = eig1.len();
    let mut props = vec![vec![T::zero(); n]; s];
    let mut final_prop = vec![T::zero(); n];
    let mut a = vec![Vec::new(); s];
    let mut b = vec![vec![T::zero(); n]; s];
    for (i, row) in tab.a().iter().enumerate() {
        a[i] = vec![vec![T::zero(); n]; row.len()];
    }
    for m in 0..n {
        let z1 = tau * eig1[m];
        let z2 = tau * eig2[m];
        for i in 0..s {
            let ci = tab.c()[i];
            props[i][m] = (ci * z1).exp() * (ci * z2).exp();
            b[i][m] = tau * tab.b()[i].eval(z1, z2)?;
            for (j, aij) in tab.a()[i].iter().enumerate() {
                a[i][j][m] = tau * aij.eval(z1, z2)?;
            }
        }
        final_prop[m] = z1.exp() * z2.exp();
    }
    Ok(ModeWeights {
        c: tab.c().to_vec(),
        props,
        final_prop,
        a,
        b,
        first_is_current: tab.c()[0] == T::zero() && tab.a()[0].is_empty(),
    })
}

/// Full snapshot of one step, for diagnostics and telescoping checks.
#[derive(Clone, Debug)]
pub struct StepRecord<T> {
    pub t: T,
    pub tau: T,
    /// Stage values U_i in nodal coordinates.
    pub stages: Vec<Vec<T>>,
    /// f(t + c_i tau, U_i) in nodal coordinates.
    pub stage_rhs: Vec<Vec<T>>,
    pub result: Vec<T>,
}

/// One-step map bound to a problem and a step size.
pub struct Stepper<'p, T> {
    problem: &'p Problem<T>,
    scheme: Scheme,
    tau: T,
    weights: ModeWeights<T>,
}

impl<'p, T: Real> Stepper<'p, T> {
    pub fn new(scheme: Scheme, problem: &'p Problem<T>, tau: T) -> Result<Self> {
        if !tau.is_finite() || tau <= T::zero() {
            return Err(Error::invalid(format!("step size must be positive, got {tau}")));
        }
        let weights = match scheme {
            Scheme::ExpEuler => {
                weights_unsplit(&ExpRkTableau::exp_euler(), problem.operator().eigenvalues(), tau)?
            }
            Scheme::Erk2 { c2 } => weights_unsplit(
                &ExpRkTableau::erk2(T::of(c2))?,
                problem.operator().eigenvalues(),
                tau,
            )?,
            Scheme::SplitEuler | Scheme::Erk2L { .. } => {
                let split = problem.split().ok_or_else(|| {
                    Error::invalid(format!(
                        "scheme {} needs a problem with a split linear part",
                        scheme.label()
                    ))
                })?;
                let tab = match scheme {
                    Scheme::SplitEuler => SplitTableau::split_euler(),
                    Scheme::Erk2L { c2 } => SplitTableau::erk2l(T::of(c2))?,
                    _ => unreachable!(),
                };
                weights_split(
                    &tab,
                    split.first().eigenvalues(),
                    split.second().eigenvalues(),
                    tau,
                )?
            }
        };
        Ok(Stepper { problem, scheme, tau, weights })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    fn check_state(&self, v: &[T], t: T) -> Result<()> {
        let cap = T::of(DIVERGENCE_CAP);
        if v.iter().all(|x| x.is_finite() && x.abs() <= cap) {
            Ok(())
        } else {
            Err(Error::Divergence { t: t.as_f64() })
        }
    }

    fn run_step(&self, t: T, u: &[T], mut record: Option<&mut StepRecord<T>>) -> Result<Vec<T>> {
        let n = self.problem.len();
        if u.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: u.len() });
        }
        let op = self.problem.operator();
        let w = &self.weights;
        let s = w.c.len();
        let mut ws = op.scratch();

        let mut um = u.to_vec();
        op.transform_in_place(&mut um, &mut ws);

        let mut fm: Vec<Vec<T>> = Vec::with_capacity(s);
        for i in 0..s {
            let t_stage = t + w.c[i] * self.tau;
            let rhs = if i == 0 && w.first_is_current {
                if let Some(rec) = record.as_deref_mut() {
                    rec.stages.push(u.to_vec());
                }
                self.problem.rhs(t_stage, u)
            } else {
                let mut stage = vec![T::zero(); n];
                for m in 0..n {
                    let mut acc = w.props[i][m] * um[m];
                    for (j, fj) in fm.iter().enumerate().take(w.a[i].len()) {
                        acc = acc + w.a[i][j][m] * fj[m];
                    }
                    stage[m] = acc;
                }
                op.transform_in_place(&mut stage, &mut ws);
                self.check_state(&stage, t_stage)?;
                let rhs = self.problem.rhs(t_stage, &stage);
                if let Some(rec) = record.as_deref_mut() {
                    rec.stages.push(stage);
                }
                rhs
            };
            if let Some(rec) = record.as_deref_mut() {
                rec.stage_rhs.push(rhs.clone());
            }
            let mut f_modes = rhs;
            op.transform_in_place(&mut f_modes, &mut ws);
            fm.push(f_modes);
        }

        let mut out = vec![T::zero(); n];
        for m in 0..n {
            let mut acc = w.final_prop[m] * um[m];
            for (i, fi) in fm.iter().enumerate() {
                acc = acc + w.b[i][m] * fi[m];
            }
            out[m] = acc;
        }
        op.transform_in_place(&mut out, &mut ws);
        self.check_state(&out, t + self.tau)?;
        Ok(out)
    }

    /// Advance one step from state u at time t.
    pub fn step(&self, t: T, u: &[T]) -> Result<Vec<T>> {
        self.run_step(t, u, None)
    }

    /// As `step`, but keeping every stage and right-hand side.
    pub fn step_recorded(&self, t: T, u: &[T]) -> Result<StepRecord<T>> {
        let mut rec = StepRecord {
            t,
            tau: self.tau,
            stages: Vec::new(),
            stage_rhs: Vec::new(),
            result: Vec::new(),
        };
        rec.result = self.run_step(t, u, Some(&mut rec))?;
        Ok(rec)
    }
}

fn step_count<T: Real>(tau: T, t_end: T) -> Result<usize> {
    if !t_end.is_finite() || t_end <= T::zero() {
        return Err(Error::invalid(format!("final time must be positive, got {t_end}")));
    }
    let ratio = (t_end / tau).as_f64();
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > STEP_FIT_TOL * ratio.max(1.0) {
        return Err(Error::invalid(format!(
            "step size {tau} does not divide the final time {t_end}"
        )));
    }
    Ok(n as usize)
}

/// March the problem from its initial data to t_end with a fixed step.
/// The step must divide the final time to within roundoff.
pub fn integrate<T: Real>(
    scheme: Scheme,
    problem: &Problem<T>,
    tau: T,
    t_end: T,
) -> Result<Vec<T>> {
    integrate_observed(scheme, problem, tau, t_end, &mut |_, _, _| {})
}

/// As `integrate`, calling the observer after every step with the number of
/// completed steps, the reached time, and the state.
pub fn integrate_observed<T: Real>(
    scheme: Scheme,
    problem: &Problem<T>,
    tau: T,
    t_end: T,
    observer: &mut dyn FnMut(usize, T, &[T]),
) -> Result<Vec<T>> {
    let stepper = Stepper::new(scheme, problem, tau)?;
    let n_steps = step_count(tau, t_end)?;
    let mut u = problem.initial().to_vec();
    for n in 0..n_steps {
        // t from n, not accumulation, so long runs do not drift
        let t = tau * T::of_usize(n);
        u = stepper.step(t, &u)?;
        observer(n + 1, tau * T::of_usize(n + 1), &u);
    }
    Ok(u)
}
