//! Orthonormal sine transform: the diagonalizing map of the Dirichlet
//! Laplacian stencils.
//!
//! With N subintervals and n = N - 1 interior nodes, the map is
//! S[j][i] = sqrt(2/N) sin((j+1)(i+1) pi / N). S is symmetric and S^2 = I,
//! so forward and inverse coincide. Small sizes use the dense matrix, larger
//! ones an odd-extension FFT of length 2N.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::scalar::Real;

/// Dense matrix multiply up to this many interior nodes (N <= 64), FFT above.
const DENSE_LIMIT: usize = 63;

pub(crate) struct Scratch<T> {
    buf: Vec<Complex<T>>,
    fft: Vec<Complex<T>>,
}

impl<T: Real> Scratch<T> {
    fn empty() -> Self {
        Scratch { buf: Vec::new(), fft: Vec::new() }
    }
}

#[derive(Clone)]
pub(crate) enum SineTransform<T> {
    /// Modal identity; lets explicitly diagonal operators share the machinery.
    Identity { n: usize },
    Dense { n: usize, mat: Vec<T> },
    Fast { n: usize, fft: Arc<dyn Fft<T>>, scale: T },
}

impl<T: Real> SineTransform<T> {
    pub fn new(n: usize) -> Self {
        if n <= DENSE_LIMIT {
            Self::new_dense(n)
        } else {
            Self::new_fast(n)
        }
    }

    pub fn identity(n: usize) -> Self {
        SineTransform::Identity { n }
    }

    pub fn new_dense(n: usize) -> Self {
        let big_n = (n + 1) as f64;
        let scale = (2.0 / big_n).sqrt();
        let mut mat = Vec::with_capacity(n * n);
        for j in 1..=n {
            for i in 1..=n {
                let angle = (j * i) as f64 * std::f64::consts::PI / big_n;
                mat.push(T::of(scale * angle.sin()));
            }
        }
        SineTransform::Dense { n, mat }
    }

    pub fn new_fast(n: usize) -> Self {
        let len = 2 * (n + 1);
        let fft = FftPlanner::new().plan_fft_forward(len);
        // DST output is -Im(FFT)/2, then the orthonormal sqrt(2/N).
        let scale = T::of(-0.5 * (2.0 / (n + 1) as f64).sqrt());
        SineTransform::Fast { n, fft, scale }
    }

    pub fn len(&self) -> usize {
        match self {
            SineTransform::Identity { n }
            | SineTransform::Dense { n, .. }
            | SineTransform::Fast { n, .. } => *n,
        }
    }

    pub fn scratch(&self) -> Scratch<T> {
        match self {
            SineTransform::Fast { n, fft, .. } => {
                let len = 2 * (n + 1);
                Scratch {
                    buf: vec![Complex::new(T::zero(), T::zero()); len],
                    fft: vec![
                        Complex::new(T::zero(), T::zero());
                        fft.get_inplace_scratch_len()
                    ],
                }
            }
            _ => Scratch::empty(),
        }
    }

    /// In-place transform of one 1D vector of length `self.len()`.
    pub fn apply(&self, io: &mut [T], scratch: &mut Scratch<T>) {
        debug_assert_eq!(io.len(), self.len());
        match self {
            SineTransform::Identity { .. } => {}
            SineTransform::Dense { n, mat } => {
                let mut out = vec![T::zero(); *n];
                for (j, slot) in out.iter_mut().enumerate() {
                    let row = &mat[j * n..(j + 1) * n];
                    let mut acc = T::zero();
                    for (m, x) in row.iter().zip(io.iter()) {
                        acc = acc + *m * *x;
                    }
                    *slot = acc;
                }
                io.copy_from_slice(&out);
            }
            SineTransform::Fast { n, fft, scale } => {
                let len = 2 * (n + 1);
                let buf = &mut scratch.buf;
                for slot in buf.iter_mut() {
                    *slot = Complex::new(T::zero(), T::zero());
                }
                for (i, &x) in io.iter().enumerate() {
                    buf[i + 1].re = x;
                    buf[len - (i + 1)].re = -x;
                }
                fft.process_with_scratch(buf, &mut scratch.fft);
                for (j, slot) in io.iter_mut().enumerate() {
                    *slot = buf[j + 1].im * *scale;
                }
            }
        }
    }
}
