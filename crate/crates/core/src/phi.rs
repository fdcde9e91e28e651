//! Scalar phi functions, weighted combinations of them, and their application
//! through a diagonalizing transform.
//!
//! phi_0(z) = e^z and, for k >= 1,
//!
//! ```text
//! phi_k(z) = integral_0^1 e^((1-s) z) s^(k-1) / (k-1)!  ds,
//! ```
//!
//! so phi_k(0) = 1/k! and phi_(k+1)(z) = (phi_k(z) - 1/k!) / z. These are the
//! weight functions of exponential integrators: one-step maps are short
//! combinations of phi_k evaluated on a scaled operator.

use crate::error::{Error, Result};
use crate::operators::SpectralOperator;
use crate::scalar::Real;

/// Highest phi order the crate evaluates.
pub const K_MAX: usize = 8;

/// 1/0! .. 1/8!
const INV_FACT: [f64; K_MAX + 1] = [
    1.0,
    1.0,
    0.5,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
];

/// 0! .. 8!
pub(crate) const FACT: [f64; K_MAX + 1] =
    [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

fn inv_fact<T: Real>(k: usize) -> T {
    T::of(INV_FACT[k])
}

/// phi_k at a real scalar argument, accurate to a few ulp over the stiff range.
///
/// Arguments with |z| < 1/2 sum the Taylor series of phi_k directly; its terms
/// decrease monotonically there. Larger arguments are halved until |w| <= 1/4,
/// the whole row phi_0..phi_K_MAX is evaluated at w, and the row is squared
/// back up through
///
/// ```text
/// phi_j(2z) = 2^(-j) ( e^z phi_j(z) + sum_(l=1..j) phi_l(z) / (j-l)! ),
/// ```
///
/// whose terms are all positive for real z, so no cancellation occurs. The
/// exponential itself is taken from libm at every level.
pub fn phi_scalar<T: Real>(k: usize, z: T) -> Result<T> {
    if k > K_MAX {
        return Err(Error::UnsupportedOrder { k });
    }
    if !z.is_finite() {
        return Err(Error::NonFinite { what: "phi argument" });
    }
    if k == 0 {
        return Ok(z.exp());
    }
    if z.abs() < T::of(0.5) {
        Ok(taylor(k, z))
    } else {
        Ok(phi_row(z)[k])
    }
}

/// Truncated Taylor sum of phi_k; valid for any z, stable for |z| <= 1/2.
fn taylor<T: Real>(k: usize, z: T) -> T {
    let mut term = inv_fact::<T>(k);
    let mut sum = term;
    for j in 1..=80usize {
        term = term * z / T::of_usize(k + j);
        let next = sum + term;
        if next == sum {
            return next;
        }
        sum = next;
    }
    sum
}

/// The row phi_0(z)..phi_K_MAX(z) by argument halving and squaring.
fn phi_row<T: Real>(z: T) -> [T; K_MAX + 1] {
    let quarter = T::of(0.25);
    let two = T::of(2.0);
    let mut w = z;
    let mut levels = 0usize;
    while w.abs() > quarter {
        w = w / two;
        levels += 1;
    }
    let mut row = [T::zero(); K_MAX + 1];
    row[0] = w.exp();
    for (j, slot) in row.iter_mut().enumerate().skip(1) {
        *slot = taylor(j, w);
    }
    let mut arg = w;
    for _ in 0..levels {
        arg = arg + arg;
        let e = row[0];
        let mut next = [T::zero(); K_MAX + 1];
        next[0] = arg.exp();
        for j in 1..=K_MAX {
            let mut acc = e * row[j];
            for l in 1..=j {
                acc = acc + row[l] * inv_fact::<T>(j - l);
            }
            next[j] = acc * T::of(INV_FACT_POW2[j]);
        }
        row = next;
    }
    row
}

/// 2^-0 .. 2^-8
const INV_FACT_POW2: [f64; K_MAX + 1] = [
    1.0,
    0.5,
    0.25,
    0.125,
    0.0625,
    0.03125,
    0.015625,
    0.0078125,
    0.00390625,
];

// Gauss-Kronrod (G7, K15) abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One G7/K15 panel on [a, b]: returns (kronrod value, |kronrod - gauss|).
fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::of(0.5);
    let center = (a + b) * T::of(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::of(WGK[7]);
    let mut gauss = fc * T::of(WG[3]);
    for j in 0..7 {
        let dx = half * T::of(XGK[j]);
        let fsum = f(center - dx) + f(center + dx);
        kronrod = kronrod + fsum * T::of(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + fsum * T::of(WG[j / 2]);
        }
    }
    kronrod = kronrod * half;
    gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive Gauss-Kronrod evaluation of the defining integral of phi_k.
///
/// Independent reference for `phi_scalar`; used by tests and the `phi`
/// diagnostic command, never on the stepping path. `tol` is an absolute
/// tolerance, floored at 1e-14.
pub fn phi_quadrature_oracle<T: Real>(k: usize, z: T, tol: T) -> Result<T> {
    if k == 0 || k > K_MAX {
        return Err(Error::invalid(format!(
            "quadrature oracle needs 1 <= k <= {K_MAX}, got {k}"
        )));
    }
    if !z.is_finite() || !tol.is_finite() {
        return Err(Error::NonFinite { what: "quadrature argument" });
    }
    let tol = tol.max(T::of(1e-14));
    let inv = inv_fact::<T>(k - 1);
    let f = |s: T| ((T::one() - s) * z).exp() * s.powi((k - 1) as i32) * inv;

    // Bisect until each panel's error estimate fits its share of `tol`.
    let mut work: Vec<(T, T, u32)> = vec![(T::zero(), T::one(), 0)];
    let mut total = T::zero();
    let mut err_total = T::zero();
    let mut panels = 0usize;
    while let Some((a, b, depth)) = work.pop() {
        panels += 1;
        if panels > 20_000 {
            return Err(Error::OracleConvergence {
                tol: tol.as_f64(),
                achieved: err_total.as_f64(),
            });
        }
        let (value, err) = gk15(&f, a, b);
        if err <= tol * (b - a) || depth >= 48 {
            total = total + value;
            err_total = err_total + err;
        } else {
            let mid = (a + b) * T::of(0.5);
            work.push((a, mid, depth + 1));
            work.push((mid, b, depth + 1));
        }
    }
    if err_total > tol * T::of(4.0) {
        return Err(Error::OracleConvergence {
            tol: tol.as_f64(),
            achieved: err_total.as_f64(),
        });
    }
    Ok(total)
}

/// coeff * phi_k(arg_scale * z); the building block of tableau entries.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiTerm<T> {
    pub k: usize,
    pub arg_scale: T,
    pub coeff: T,
}

/// Ordered sum of phi terms. The empty combination is the zero function.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiCombo<T> {
    terms: Vec<PhiTerm<T>>,
}

impl<T: Real> PhiCombo<T> {
    pub fn new(terms: Vec<PhiTerm<T>>) -> Result<Self> {
        for term in &terms {
            if term.k > K_MAX {
                return Err(Error::UnsupportedOrder { k: term.k });
            }
            if !term.arg_scale.is_finite() || term.arg_scale <= T::zero() || term.arg_scale > T::one() {
                return Err(Error::invalid(format!(
                    "phi term argument scale must lie in (0, 1], got {}",
                    term.arg_scale
                )));
            }
            if !term.coeff.is_finite() {
                return Err(Error::NonFinite { what: "phi term coefficient" });
            }
        }
        Ok(PhiCombo { terms })
    }

    pub fn single(k: usize, arg_scale: T, coeff: T) -> Result<Self> {
        Self::new(vec![PhiTerm { k, arg_scale, coeff }])
    }

    pub fn zero() -> Self {
        PhiCombo { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[PhiTerm<T>] {
        &self.terms
    }

    /// Sum of coeff * phi_k(arg_scale * z) over the terms.
    pub fn eval(&self, z: T) -> Result<T> {
        let mut acc = T::zero();
        for term in &self.terms {
            acc = acc + term.coeff * phi_scalar(term.k, term.arg_scale * z)?;
        }
        Ok(acc)
    }
}

/// phi_k(t A) v through the operator's diagonalizing transform.
pub fn apply_spectral<T: Real>(
    k: usize,
    t: T,
    op: &SpectralOperator<T>,
    v: &[T],
) -> Result<Vec<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite { what: "time argument" });
    }
    let mut modes = op.to_modes(v)?;
    for (m, lam) in modes.iter_mut().zip(op.eigenvalues()) {
        *m = *m * phi_scalar(k, t * *lam)?;
    }
    op.from_modes(&modes)
}

/// (sum_i coeff_i phi_(k_i)(scale_i t A)) v through the transform.
pub fn apply_combo_spectral<T: Real>(
    combo: &PhiCombo<T>,
    t: T,
    op: &SpectralOperator<T>,
    v: &[T],
) -> Result<Vec<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite { what: "time argument" });
    }
    let mut modes = op.to_modes(v)?;
    for (m, lam) in modes.iter_mut().zip(op.eigenvalues()) {
        *m = *m * combo.eval(t * *lam)?;
    }
    op.from_modes(&modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_is_exp() {
        assert_eq!(phi_scalar(0, -2.0f64).unwrap(), (-2.0f64).exp());
    }

    #[test]
    fn value_at_zero_is_inverse_factorial() {
        for k in 0..=K_MAX {
            assert_eq!(phi_scalar(k, 0.0f64).unwrap(), INV_FACT[k]);
        }
    }

    #[test]
    fn known_closed_forms() {
        // phi_1(z) = (e^z - 1)/z, phi_2(z) = (e^z - 1 - z)/z^2
        let p1 = phi_scalar(1, -2.0f64).unwrap();
        assert!((p1 - 0.432_332_358_381_693_65).abs() < 1e-15);
        let p2 = phi_scalar(2, -1.0f64).unwrap();
        assert!((p2 - (-1.0f64).exp()).abs() < 1e-15);
        let p2m2 = phi_scalar(2, -2.0f64).unwrap();
        assert!((p2m2 - 0.283_833_820_809_153_17).abs() < 1e-15);
    }

    #[test]
    fn order_above_limit_rejected() {
        assert!(matches!(
            phi_scalar(K_MAX + 1, 0.0f64),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            phi_scalar(1, f64::NAN),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            phi_scalar(1, f64::INFINITY),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn small_argument_continuity() {
        // |phi_k(z) - 1/k!| <= 2 |z| near zero
        for k in 1..=K_MAX {
            for &z in &[1e-6f64, -1e-6, 1e-9, -1e-9, 1e-12, -1e-12] {
                let p = phi_scalar(k, z).unwrap();
                assert!((p - INV_FACT[k]).abs() <= 2.0 * z.abs(), "k={k} z={z}");
            }
        }
    }

    #[test]
    fn combo_eval_matches_hand_value() {
        // (1/2) phi_1(z/2) at z = -2 equals (1 - e^-1)/2
        let combo = PhiCombo::single(1, 0.5f64, 0.5).unwrap();
        let got = combo.eval(-2.0).unwrap();
        assert!((got - 0.316_060_279_414_278_84).abs() < 1e-15);
        assert_eq!(PhiCombo::<f64>::zero().eval(3.0).unwrap(), 0.0);
    }

    #[test]
    fn combo_validation() {
        assert!(PhiCombo::single(9, 1.0f64, 1.0).is_err());
        assert!(PhiCombo::single(1, 0.0f64, 1.0).is_err());
        assert!(PhiCombo::single(1, 1.5f64, 1.0).is_err());
        assert!(PhiCombo::single(1, 1.0f64, f64::NAN).is_err());
    }

    #[test]
    fn oracle_rejects_bad_order() {
        assert!(phi_quadrature_oracle(0, 1.0f64, 1e-12).is_err());
        assert!(phi_quadrature_oracle(K_MAX + 1, 1.0f64, 1e-12).is_err());
    }

    #[test]
    fn oracle_matches_closed_form() {
        let got = phi_quadrature_oracle(1, -2.0f64, 1e-13).unwrap();
        assert!((got - 0.432_332_358_381_693_65).abs() < 1e-12);
        let got = phi_quadrature_oracle(2, 0.0f64, 1e-13).unwrap();
        assert!((got - 0.5).abs() < 1e-13);
    }
}
