//! Dense reference backend: matrix exponential by Pade approximation with
//! scaling and squaring, and phi functions of small matrices through one
//! exponential of a block-augmented companion matrix.
//!
//! Everything here is O(n^3) with no structure assumptions. It exists to
//! cross-check the transform-based fast path on small cases, not to step
//! anything at production size.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest n + k the block-augmented phi construction accepts.
const MAX_AUGMENTED: usize = 512;

/// Degree-13 Pade numerator coefficients for exp.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Scaling threshold for the degree-13 approximant.
const THETA13: f64 = 5.371_920_351_148_152;

fn one_norm<T: Real>(a: &Array2<T>) -> T {
    let mut worst = T::zero();
    for col in a.columns() {
        let mut sum = T::zero();
        for x in col {
            sum += x.abs();
        }
        worst = worst.max(sum);
    }
    worst
}

/// Solve A X = B by LU with partial pivoting; consumes both arguments.
fn lu_solve<T: Real>(mut a: Array2<T>, mut b: Array2<T>) -> Result<Array2<T>> {
    let n = a.nrows();
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].abs();
        for row in col + 1..n {
            let mag = a[(row, col)].abs();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == T::zero() {
            return Err(Error::invalid("singular matrix in dense solve"));
        }
        if pivot != col {
            for j in 0..n {
                a.swap((col, j), (pivot, j));
            }
            for j in 0..b.ncols() {
                b.swap((col, j), (pivot, j));
            }
        }
        let diag = a[(col, col)];
        for row in col + 1..n {
            let factor = a[(row, col)] / diag;
            a[(row, col)] = factor;
            for j in col + 1..n {
                let sub = factor * a[(col, j)];
                a[(row, j)] -= sub;
            }
        }
    }
    // Forward substitution with the unit-lower factor, then back substitution.
    for j in 0..b.ncols() {
        for i in 1..n {
            let mut acc = b[(i, j)];
            for l in 0..i {
                acc = acc - a[(i, l)] * b[(l, j)];
            }
            b[(i, j)] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[(i, j)];
            for l in i + 1..n {
                acc = acc - a[(i, l)] * b[(l, j)];
            }
            b[(i, j)] = acc / a[(i, i)];
        }
    }
    Ok(b)
}

/// exp(A) for a square matrix: degree-13 Pade approximant after scaling
/// the one-norm below THETA13, then repeated squaring.
pub fn expm<T: Real>(a: &Array2<T>) -> Result<Array2<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch { expected: n, got: a.ncols() });
    }
    if !a.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite { what: "matrix entries" });
    }
    let norm = one_norm(a).as_f64();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as usize
    } else {
        0
    };
    let scaled = a.mapv(|x| x / T::of_usize(1 << squarings.min(62)));

    let eye = Array2::<T>::eye(n);
    let c = |j: usize| T::of(PADE13[j]);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let u_inner = a6.mapv(|x| x * c(13)) + a4.mapv(|x| x * c(11)) + a2.mapv(|x| x * c(9));
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|x| x * c(7))
        + a4.mapv(|x| x * c(5))
        + a2.mapv(|x| x * c(3))
        + eye.mapv(|x| x * c(1));
    let u = scaled.dot(&u_poly);
    let v_inner = a6.mapv(|x| x * c(12)) + a4.mapv(|x| x * c(10)) + a2.mapv(|x| x * c(8));
    let v = a6.dot(&v_inner)
        + a6.mapv(|x| x * c(6))
        + a4.mapv(|x| x * c(4))
        + a2.mapv(|x| x * c(2))
        + eye.mapv(|x| x * c(0));

    let mut result = lu_solve(&v - &u, &v + &u)?;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

/// phi_0(tA) .. phi_k(tA) from one exponential of the (k+1)n block matrix
///
/// ```text
/// W = [ tA  I        ]
///     [     0  I     ]
///     [        .. I  ]
///     [           0  ]
/// ```
///
/// whose exponential carries phi_j(tA) in block (0, j).
pub fn phi_dense_family<T: Real>(k: usize, t: T, a: &Array2<T>) -> Result<Vec<Array2<T>>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::ShapeMismatch { expected: n, got: a.ncols() });
    }
    if k > crate::phi::K_MAX {
        return Err(Error::UnsupportedOrder { k });
    }
    if n + k > MAX_AUGMENTED {
        return Err(Error::ReferenceScale { max: MAX_AUGMENTED, got: n + k });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite { what: "time argument" });
    }
    let big = (k + 1) * n;
    let mut w = Array2::<T>::zeros((big, big));
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] = t * a[(i, j)];
        }
    }
    for block in 0..k {
        for i in 0..n {
            w[(block * n + i, (block + 1) * n + i)] = T::one();
        }
    }
    let e = expm(&w)?;
    let mut family = Vec::with_capacity(k + 1);
    for block in 0..=k {
        let mut phi = Array2::<T>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                phi[(i, j)] = e[(i, block * n + j)];
            }
        }
        family.push(phi);
    }
    Ok(family)
}

/// phi_k(tA) alone.
pub fn phi_dense<T: Real>(k: usize, t: T, a: &Array2<T>) -> Result<Array2<T>> {
    Ok(phi_dense_family(k, t, a)?.pop().expect("family is never empty"))
}
