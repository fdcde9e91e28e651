//! Tableaux of exponential Runge-Kutta schemes. Weights are functions of the
//! scaled operator rather than plain numbers: each entry is a combination of
//! phi functions, and for the splitting schemes a combination of products of
//! phi functions of the two split parts.
//!
//! Stage i computes U_i = P(c_i tau A) u_n + tau sum_j a_ij(tau A) f(U_j),
//! the step ends with u_(n+1) = P(tau A) u_n + tau sum_i b_i(tau A) f(U_i),
//! where P is the exponential of the full operator or the ordered product of
//! the split exponentials.

use crate::error::{Error, Result};
use crate::phi::{phi_scalar, PhiCombo, PhiTerm, K_MAX};
use crate::scalar::Real;

fn check_abscissa<T: Real>(c: T) -> Result<()> {
    if !c.is_finite() || c < T::zero() || c > T::one() {
        return Err(Error::invalid(format!("abscissa must lie in [0, 1], got {c}")));
    }
    Ok(())
}

fn check_c2<T: Real>(c2: T) -> Result<()> {
    if !c2.is_finite() || c2 <= T::zero() || c2 > T::one() {
        return Err(Error::invalid(format!(
            "second abscissa must lie in (0, 1], got {c2}"
        )));
    }
    Ok(())
}

/// Tableau whose weights act on one unsplit operator.
#[derive(Clone, Debug)]
pub struct ExpRkTableau<T> {
    label: String,
    order: usize,
    c: Vec<T>,
    b: Vec<PhiCombo<T>>,
    a: Vec<Vec<PhiCombo<T>>>,
}

impl<T: Real> ExpRkTableau<T> {
    pub fn custom(
        label: impl Into<String>,
        order: usize,
        c: Vec<T>,
        b: Vec<PhiCombo<T>>,
        a: Vec<Vec<PhiCombo<T>>>,
    ) -> Result<Self> {
        let s = c.len();
        if s == 0 {
            return Err(Error::invalid("tableau needs at least one stage"));
        }
        if b.len() != s || a.len() != s {
            return Err(Error::ShapeMismatch { expected: s, got: b.len().max(a.len()) });
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != i {
                return Err(Error::invalid(format!(
                    "stage {i} must couple to exactly the {i} earlier stages, got {}",
                    row.len()
                )));
            }
        }
        for &ci in &c {
            check_abscissa(ci)?;
        }
        if order == 0 || order > K_MAX {
            return Err(Error::invalid(format!("claimed order must be 1..={K_MAX}, got {order}")));
        }
        Ok(ExpRkTableau { label: label.into(), order, c, b, a })
    }

    /// Exponential Euler: u_(n+1) = e^(tau A) u_n + tau phi_1(tau A) f(u_n).
    pub fn exp_euler() -> Self {
        ExpRkTableau {
            label: "expeuler".into(),
            order: 1,
            c: vec![T::zero()],
            b: vec![PhiCombo::single(1, T::one(), T::one()).expect("static tableau")],
            a: vec![vec![]],
        }
    }

    /// The one-parameter second-order family with abscissa c2.
    pub fn erk2(c2: T) -> Result<Self> {
        check_c2(c2)?;
        let inv_c2 = T::one() / c2;
        let b1 = PhiCombo::new(vec![
            PhiTerm { k: 1, arg_scale: T::one(), coeff: T::one() },
            PhiTerm { k: 2, arg_scale: T::one(), coeff: -inv_c2 },
        ])?;
        let b2 = PhiCombo::single(2, T::one(), inv_c2)?;
        let a21 = PhiCombo::single(1, c2, c2)?;
        Ok(ExpRkTableau {
            label: format!("erk2(c2={c2})"),
            order: 2,
            c: vec![T::zero(), c2],
            b: vec![b1, b2],
            a: vec![vec![], vec![a21]],
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn b(&self) -> &[PhiCombo<T>] {
        &self.b
    }

    pub fn a(&self) -> &[Vec<PhiCombo<T>>] {
        &self.a
    }

    /// Residuals of the stiff order conditions at a built-in argument sample.
    /// Exact tableaux come back at roundoff level.
    pub fn check_order_conditions(&self) -> Result<OrderConditionReport<T>> {
        let zs: Vec<T> = SAMPLE_ARGS.iter().map(|&z| T::of(z)).collect();
        self.check_order_conditions_at(&zs)
    }

    /// Same residuals, sampled at caller-chosen arguments.
    pub fn check_order_conditions_at(&self, zs: &[T]) -> Result<OrderConditionReport<T>> {
        let mut weight_residuals = vec![T::zero(); self.order];
        let mut stage_residuals = vec![T::zero(); self.stages()];
        for &z in zs {
            for m in 1..=self.order {
                let mut lhs = T::zero();
                for (bi, &ci) in self.b.iter().zip(&self.c) {
                    lhs = lhs + bi.eval(z)? * ci.powi((m - 1) as i32);
                }
                let rhs = phi_scalar(m, z)? * T::of(crate::phi::FACT[m - 1]);
                let res = (lhs - rhs).abs();
                if res > weight_residuals[m - 1] {
                    weight_residuals[m - 1] = res;
                }
            }
            for (i, row) in self.a.iter().enumerate() {
                let mut lhs = T::zero();
                for aij in row {
                    lhs = lhs + aij.eval(z)?;
                }
                let ci = self.c[i];
                let rhs = ci * phi_scalar(1, ci * z)?;
                let res = (lhs - rhs).abs();
                if res > stage_residuals[i] {
                    stage_residuals[i] = res;
                }
            }
        }
        Ok(OrderConditionReport {
            label: self.label.clone(),
            order: self.order,
            weight_residuals,
            stage_residuals,
        })
    }
}

/// coeff * phi_k1(arg_scale z1) * phi_k2(arg_scale z2), one term of a split
/// weight; z1 and z2 are the two split parts of the scaled operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitTerm<T> {
    pub coeff: T,
    pub k1: usize,
    pub k2: usize,
    pub arg_scale: T,
}

/// Sum of product-form terms; the split analogue of a phi combination.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitWeight<T> {
    terms: Vec<SplitTerm<T>>,
}

impl<T: Real> SplitWeight<T> {
    pub fn new(terms: Vec<SplitTerm<T>>) -> Result<Self> {
        for term in &terms {
            if term.k1 > K_MAX || term.k2 > K_MAX {
                return Err(Error::UnsupportedOrder { k: term.k1.max(term.k2) });
            }
            if !term.arg_scale.is_finite()
                || term.arg_scale <= T::zero()
                || term.arg_scale > T::one()
            {
                return Err(Error::invalid(format!(
                    "split term argument scale must lie in (0, 1], got {}",
                    term.arg_scale
                )));
            }
            if !term.coeff.is_finite() {
                return Err(Error::NonFinite { what: "split term coefficient" });
            }
        }
        Ok(SplitWeight { terms })
    }

    pub fn terms(&self) -> &[SplitTerm<T>] {
        &self.terms
    }

    pub fn eval(&self, z1: T, z2: T) -> Result<T> {
        let mut acc = T::zero();
        for term in &self.terms {
            acc = acc
                + term.coeff
                    * phi_scalar(term.k1, term.arg_scale * z1)?
                    * phi_scalar(term.k2, term.arg_scale * z2)?;
        }
        Ok(acc)
    }
}

/// Tableau whose weights are products of phi functions of the two split
/// parts, and whose propagator is e^(c tau A1) e^(c tau A2).
#[derive(Clone, Debug)]
pub struct SplitTableau<T> {
    label: String,
    order: usize,
    c: Vec<T>,
    b: Vec<SplitWeight<T>>,
    a: Vec<Vec<SplitWeight<T>>>,
}

impl<T: Real> SplitTableau<T> {
    pub fn custom(
        label: impl Into<String>,
        order: usize,
        c: Vec<T>,
        b: Vec<SplitWeight<T>>,
        a: Vec<Vec<SplitWeight<T>>>,
    ) -> Result<Self> {
        let s = c.len();
        if s == 0 {
            return Err(Error::invalid("tableau needs at least one stage"));
        }
        if b.len() != s || a.len() != s {
            return Err(Error::ShapeMismatch { expected: s, got: b.len().max(a.len()) });
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != i {
                return Err(Error::invalid(format!(
                    "stage {i} must couple to exactly the {i} earlier stages, got {}",
                    row.len()
                )));
            }
        }
        for &ci in &c {
            check_abscissa(ci)?;
        }
        if order == 0 || order > K_MAX {
            return Err(Error::invalid(format!("claimed order must be 1..={K_MAX}, got {order}")));
        }
        Ok(SplitTableau { label: label.into(), order, c, b, a })
    }

    /// Split exponential Euler:
    /// u_(n+1) = e^(tau A1) e^(tau A2) u_n
    ///           + tau phi_1(tau A1) phi_1(tau A2) f(u_n).
    pub fn split_euler() -> Self {
        let b1 = SplitWeight::new(vec![SplitTerm {
            coeff: T::one(),
            k1: 1,
            k2: 1,
            arg_scale: T::one(),
        }])
        .expect("static tableau");
        SplitTableau {
            label: "split_euler".into(),
            order: 1,
            c: vec![T::zero()],
            b: vec![b1],
            a: vec![vec![]],
        }
    }

    /// Second-order split family: the erk2 weights with each phi_k replaced
    /// by k! phi_k(.) phi_k(.) of the two parts.
    pub fn erk2l(c2: T) -> Result<Self> {
        check_c2(c2)?;
        let two_over_c2 = T::of(2.0) / c2;
        let b1 = SplitWeight::new(vec![
            SplitTerm { coeff: T::one(), k1: 1, k2: 1, arg_scale: T::one() },
            SplitTerm { coeff: -two_over_c2, k1: 2, k2: 2, arg_scale: T::one() },
        ])?;
        let b2 = SplitWeight::new(vec![SplitTerm {
            coeff: two_over_c2,
            k1: 2,
            k2: 2,
            arg_scale: T::one(),
        }])?;
        let a21 = SplitWeight::new(vec![SplitTerm { coeff: c2, k1: 1, k2: 1, arg_scale: c2 }])?;
        Ok(SplitTableau {
            label: format!("erk2l(c2={c2})"),
            order: 2,
            c: vec![T::zero(), c2],
            b: vec![b1, b2],
            a: vec![vec![], vec![a21]],
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn b(&self) -> &[SplitWeight<T>] {
        &self.b
    }

    pub fn a(&self) -> &[Vec<SplitWeight<T>>] {
        &self.a
    }

    /// Order conditions along the two axes where one split part vanishes;
    /// there the product weights collapse to plain phi combinations and the
    /// unsplit conditions must hold exactly.
    pub fn check_order_conditions(&self) -> Result<OrderConditionReport<T>> {
        let zs: Vec<T> = SAMPLE_ARGS.iter().map(|&z| T::of(z)).collect();
        self.check_order_conditions_at(&zs)
    }

    /// Same residuals, sampled at caller-chosen arguments.
    pub fn check_order_conditions_at(&self, zs: &[T]) -> Result<OrderConditionReport<T>> {
        let mut weight_residuals = vec![T::zero(); self.order];
        let mut stage_residuals = vec![T::zero(); self.stages()];
        for &z in zs {
            for (z1, z2) in [(z, T::zero()), (T::zero(), z)] {
                for m in 1..=self.order {
                    let mut lhs = T::zero();
                    for (bi, &ci) in self.b.iter().zip(&self.c) {
                        lhs = lhs + bi.eval(z1, z2)? * ci.powi((m - 1) as i32);
                    }
                    let rhs = phi_scalar(m, z)? * T::of(crate::phi::FACT[m - 1]);
                    let res = (lhs - rhs).abs();
                    if res > weight_residuals[m - 1] {
                        weight_residuals[m - 1] = res;
                    }
                }
                for (i, row) in self.a.iter().enumerate() {
                    let mut lhs = T::zero();
                    for aij in row {
                        lhs = lhs + aij.eval(z1, z2)?;
                    }
                    let ci = self.c[i];
                    let rhs = ci * phi_scalar(1, ci * z)?;
                    let res = (lhs - rhs).abs();
                    if res > stage_residuals[i] {
                        stage_residuals[i] = res;
                    }
                }
            }
        }
        Ok(OrderConditionReport {
            label: self.label.clone(),
            order: self.order,
            weight_residuals,
            stage_residuals,
        })
    }
}

/// Arguments the order conditions are sampled at; m = 1..order then uses
/// sum_i b_i(z) c_i^(m-1) = (m-1)! phi_m(z).
const SAMPLE_ARGS: &[f64] = &[0.0, -0.125, -0.5, -1.0, -4.0, -16.0, -64.0, -256.0, 0.5];

/// Worst-case residuals of the order and stage-consistency conditions.
#[derive(Clone, Debug)]
pub struct OrderConditionReport<T> {
    pub label: String,
    pub order: usize,
    /// weight_residuals[m-1] is the residual of the order-m condition.
    pub weight_residuals: Vec<T>,
    /// stage_residuals[i] is the residual of stage i's consistency condition.
    pub stage_residuals: Vec<T>,
}

impl<T: Real> OrderConditionReport<T> {
    pub fn max_residual(&self) -> T {
        self.weight_residuals
            .iter()
            .chain(self.stage_residuals.iter())
            .fold(T::zero(), |acc, &r| acc.max(r))
    }

    pub fn passes(&self, tol: T) -> bool {
        self.max_residual() <= tol
    }
}
