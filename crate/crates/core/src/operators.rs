//! Grids on the unit interval and unit square, and the linear operators the
//! integrators exponentiate: Dirichlet Laplacian stencils diagonalized by the
//! sine transform, their directional split parts, and explicitly diagonal
//! operators for small hand-checkable cases.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::transform::{Scratch, SineTransform};

const MAX_N_1D: usize = 4096;
const MAX_N_2D: usize = 512;
const MAX_DENSE: usize = 2048;

/// Uniform grid over (0,1) or (0,1)^2 with homogeneous Dirichlet boundary.
///
/// `n_sub` counts subintervals per direction, so there are `n_sub - 1`
/// interior nodes per direction and the spacing is `1 / n_sub`. Vectors hold
/// interior values only, row-major with x fastest in 2D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    dims: usize,
    n_sub: usize,
}

impl Grid {
    pub fn line(n_sub: usize) -> Result<Self> {
        if !(2..=MAX_N_1D).contains(&n_sub) {
            return Err(Error::invalid(format!(
                "1D grid needs 2 <= subintervals <= {MAX_N_1D}, got {n_sub}"
            )));
        }
        Ok(Grid { dims: 1, n_sub })
    }

    pub fn square(n_sub: usize) -> Result<Self> {
        if !(2..=MAX_N_2D).contains(&n_sub) {
            return Err(Error::invalid(format!(
                "2D grid needs 2 <= subintervals <= {MAX_N_2D}, got {n_sub}"
            )));
        }
        Ok(Grid { dims: 2, n_sub })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn n_sub(&self) -> usize {
        self.n_sub
    }

    /// Interior nodes per direction.
    pub fn interior(&self) -> usize {
        self.n_sub - 1
    }

    /// Total unknowns: interior() in 1D, interior()^2 in 2D.
    pub fn total(&self) -> usize {
        self.interior().pow(self.dims as u32)
    }

    pub fn spacing<T: Real>(&self) -> T {
        T::one() / T::of_usize(self.n_sub)
    }

    /// Coordinates of the interior node behind flat index `idx`;
    /// y is 0 for 1D grids.
    pub fn node<T: Real>(&self, idx: usize) -> (T, T) {
        let h = self.spacing::<T>();
        match self.dims {
            1 => (T::of_usize(idx + 1) * h, T::zero()),
            _ => {
                let n = self.interior();
                let ix = idx % n;
                let iy = idx / n;
                (T::of_usize(ix + 1) * h, T::of_usize(iy + 1) * h)
            }
        }
    }
}

/// Eigenvalue of the second-difference stencil on mode j (1-based):
/// -4 nu N^2 sin^2(j pi / (2N)).
fn stencil_eigenvalue<T: Real>(nu: T, n_sub: usize, j: usize) -> T {
    let angle = T::of_usize(j) * T::PI() / (T::of_usize(2 * n_sub));
    let s = angle.sin();
    -T::of(4.0) * nu * T::of_usize(n_sub * n_sub) * s * s
}

fn check_nu<T: Real>(nu: T) -> Result<()> {
    if !nu.is_finite() || nu <= T::zero() {
        return Err(Error::invalid(format!("diffusivity must be positive, got {nu}")));
    }
    Ok(())
}

pub(crate) struct ModeScratch<T> {
    line: Scratch<T>,
    col: Vec<T>,
}

/// A self-adjoint operator given by its eigenvalues in an explicit
/// orthonormal eigenbasis, with fast transforms in and out of that basis.
#[derive(Clone)]
pub struct SpectralOperator<T> {
    grid: Grid,
    label: &'static str,
    eigvals: Vec<T>,
    transform: SineTransform<T>,
}

impl<T: Real> SpectralOperator<T> {
    /// nu * (second difference) on a 1D grid.
    pub fn laplacian_1d(grid: Grid, nu: T) -> Result<Self> {
        check_nu(nu)?;
        if grid.dims() != 1 {
            return Err(Error::invalid("laplacian_1d needs a 1D grid"));
        }
        let n = grid.interior();
        let eigvals = (1..=n).map(|j| stencil_eigenvalue(nu, grid.n_sub(), j)).collect();
        Ok(SpectralOperator {
            grid,
            label: "laplacian_1d",
            eigvals,
            transform: SineTransform::new(n),
        })
    }

    /// nu * (five-point Laplacian) on a 2D grid.
    pub fn laplacian_2d(grid: Grid, nu: T) -> Result<Self> {
        Self::laplacian_2d_part(grid, nu, "laplacian_2d", true, true)
    }

    /// The x-direction term of the five-point Laplacian, still expressed in
    /// the full 2D eigenbasis so it composes with the y part.
    pub fn laplacian_2d_x(grid: Grid, nu: T) -> Result<Self> {
        Self::laplacian_2d_part(grid, nu, "laplacian_2d_x", true, false)
    }

    /// The y-direction term of the five-point Laplacian.
    pub fn laplacian_2d_y(grid: Grid, nu: T) -> Result<Self> {
        Self::laplacian_2d_part(grid, nu, "laplacian_2d_y", false, true)
    }

    fn laplacian_2d_part(
        grid: Grid,
        nu: T,
        label: &'static str,
        with_x: bool,
        with_y: bool,
    ) -> Result<Self> {
        check_nu(nu)?;
        if grid.dims() != 2 {
            return Err(Error::invalid(format!("{label} needs a 2D grid")));
        }
        let n = grid.interior();
        let line: Vec<T> = (1..=n).map(|j| stencil_eigenvalue(nu, grid.n_sub(), j)).collect();
        let mut eigvals = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                let mut lam = T::zero();
                if with_x {
                    lam = lam + line[ix];
                }
                if with_y {
                    lam = lam + line[iy];
                }
                eigvals.push(lam);
            }
        }
        Ok(SpectralOperator {
            grid,
            label,
            eigvals,
            transform: SineTransform::new(n),
        })
    }

    /// Operator that is already diagonal in nodal coordinates. Used for
    /// scalar and hand-sized cases; the grid is a formal 1D container.
    pub fn diagonal(eigvals: Vec<T>) -> Result<Self> {
        if eigvals.is_empty() || eigvals.len() + 1 > MAX_N_1D {
            return Err(Error::invalid(format!(
                "diagonal operator needs 1 to {} entries, got {}",
                MAX_N_1D - 1,
                eigvals.len()
            )));
        }
        if !crate::scalar::all_finite(&eigvals) {
            return Err(Error::NonFinite { what: "diagonal operator entries" });
        }
        let n = eigvals.len();
        Ok(SpectralOperator {
            grid: Grid::line(n + 1)?,
            label: "diagonal",
            eigvals,
            transform: SineTransform::identity(n),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    pub fn len(&self) -> usize {
        self.eigvals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigvals.is_empty()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigvals
    }

    pub(crate) fn scratch(&self) -> ModeScratch<T> {
        let col = match self.grid.dims() {
            2 => vec![T::zero(); self.grid.interior()],
            _ => Vec::new(),
        };
        ModeScratch { line: self.transform.scratch(), col }
    }

    /// The basis change, applied in place. It is an involution, so it serves
    /// as both directions.
    pub(crate) fn transform_in_place(&self, io: &mut [T], ws: &mut ModeScratch<T>) {
        let n = self.grid.interior();
        match self.grid.dims() {
            1 => self.transform.apply(io, &mut ws.line),
            _ => {
                for row in io.chunks_exact_mut(n) {
                    self.transform.apply(row, &mut ws.line);
                }
                for ix in 0..n {
                    for iy in 0..n {
                        ws.col[iy] = io[iy * n + ix];
                    }
                    self.transform.apply(&mut ws.col, &mut ws.line);
                    for iy in 0..n {
                        io[iy * n + ix] = ws.col[iy];
                    }
                }
            }
        }
    }

    fn checked_copy(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.len() {
            return Err(Error::ShapeMismatch { expected: self.len(), got: v.len() });
        }
        Ok(v.to_vec())
    }

    /// Nodal values to eigenbasis coefficients.
    pub fn to_modes(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = self.checked_copy(v)?;
        self.transform_in_place(&mut out, &mut self.scratch());
        Ok(out)
    }

    /// Eigenbasis coefficients back to nodal values.
    pub fn from_modes(&self, modes: &[T]) -> Result<Vec<T>> {
        self.to_modes(modes)
    }

    /// A v.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        let mut modes = self.to_modes(v)?;
        for (m, lam) in modes.iter_mut().zip(&self.eigvals) {
            *m = *m * *lam;
        }
        self.from_modes(&modes)
    }

    /// The operator as an explicit matrix, for small reference computations.
    pub fn dense_matrix(&self) -> Result<Array2<T>> {
        let n = self.len();
        if n > MAX_DENSE {
            return Err(Error::ReferenceScale { max: MAX_DENSE, got: n });
        }
        let mut mat = Array2::zeros((n, n));
        let mut unit = vec![T::zero(); n];
        for j in 0..n {
            unit[j] = T::one();
            let col = self.apply(&unit)?;
            unit[j] = T::zero();
            for (i, value) in col.into_iter().enumerate() {
                mat[(i, j)] = value;
            }
        }
        Ok(mat)
    }
}

/// A = first + second where both parts share one eigenbasis, so products of
/// their exponentials stay computable by transforms alone.
#[derive(Clone)]
pub struct SplitOperator<T> {
    full: SpectralOperator<T>,
    parts: [SpectralOperator<T>; 2],
}

impl<T: Real> SplitOperator<T> {
    /// Directional splitting of the 2D Laplacian: first the x term, then y.
    pub fn laplacian_2d(grid: Grid, nu: T) -> Result<Self> {
        Ok(SplitOperator {
            full: SpectralOperator::laplacian_2d(grid, nu)?,
            parts: [
                SpectralOperator::laplacian_2d_x(grid, nu)?,
                SpectralOperator::laplacian_2d_y(grid, nu)?,
            ],
        })
    }

    /// Split of explicitly diagonal operators; the full operator is the
    /// entrywise sum.
    pub fn diagonal(first: Vec<T>, second: Vec<T>) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::ShapeMismatch { expected: first.len(), got: second.len() });
        }
        let sum: Vec<T> = first.iter().zip(&second).map(|(a, b)| *a + *b).collect();
        Ok(SplitOperator {
            full: SpectralOperator::diagonal(sum)?,
            parts: [
                SpectralOperator::diagonal(first)?,
                SpectralOperator::diagonal(second)?,
            ],
        })
    }

    pub fn full(&self) -> &SpectralOperator<T> {
        &self.full
    }

    pub fn first(&self) -> &SpectralOperator<T> {
        &self.parts[0]
    }

    pub fn second(&self) -> &SpectralOperator<T> {
        &self.parts[1]
    }
}

/// Centered-difference gradient with the boundary values pinned to zero.
pub fn gradient_1d<T: Real>(grid: &Grid, v: &[T]) -> Result<Vec<T>> {
    if grid.dims() != 1 {
        return Err(Error::invalid("gradient_1d needs a 1D grid"));
    }
    let n = grid.interior();
    if v.len() != n {
        return Err(Error::ShapeMismatch { expected: n, got: v.len() });
    }
    let half_inv_h = T::of(0.5) / grid.spacing::<T>();
    let mut out = vec![T::zero(); n];
    for i in 0..n {
        let left = if i == 0 { T::zero() } else { v[i - 1] };
        let right = if i + 1 == n { T::zero() } else { v[i + 1] };
        out[i] = (right - left) * half_inv_h;
    }
    Ok(out)
}

/// Centered-difference gradient (d/dx, d/dy) on a 2D grid, zero boundary.
pub fn gradient_2d<T: Real>(grid: &Grid, v: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if grid.dims() != 2 {
        return Err(Error::invalid("gradient_2d needs a 2D grid"));
    }
    let n = grid.interior();
    if v.len() != n * n {
        return Err(Error::ShapeMismatch { expected: n * n, got: v.len() });
    }
    let half_inv_h = T::of(0.5) / grid.spacing::<T>();
    let mut dx = vec![T::zero(); n * n];
    let mut dy = vec![T::zero(); n * n];
    for iy in 0..n {
        for ix in 0..n {
            let idx = iy * n + ix;
            let left = if ix == 0 { T::zero() } else { v[idx - 1] };
            let right = if ix + 1 == n { T::zero() } else { v[idx + 1] };
            dx[idx] = (right - left) * half_inv_h;
            let below = if iy == 0 { T::zero() } else { v[idx - n] };
            let above = if iy + 1 == n { T::zero() } else { v[idx + n] };
            dy[idx] = (above - below) * half_inv_h;
        }
    }
    Ok((dx, dy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_bounds() {
        assert!(Grid::line(1).is_err());
        assert!(Grid::line(2).is_ok());
        assert!(Grid::line(4096).is_ok());
        assert!(Grid::line(4097).is_err());
        assert!(Grid::square(512).is_ok());
        assert!(Grid::square(513).is_err());
        let g = Grid::square(8).unwrap();
        assert_eq!(g.interior(), 7);
        assert_eq!(g.total(), 49);
        assert_eq!(g.spacing::<f64>(), 0.125);
    }

    #[test]
    fn coarsest_eigenvalues_in_closed_form() {
        // N=2 leaves one interior node; the stencil is -2 nu N^2 = -8 nu.
        let g = Grid::line(2).unwrap();
        let op = SpectralOperator::laplacian_1d(g, 1.0f64).unwrap();
        assert_eq!(op.len(), 1);
        assert!((op.eigenvalues()[0] + 8.0).abs() < 1e-12);

        let g2 = Grid::square(2).unwrap();
        let op2 = SpectralOperator::laplacian_2d(g2, 0.25f64).unwrap();
        assert!((op2.eigenvalues()[0] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn apply_matches_stencil_1d() {
        let g = Grid::line(9).unwrap();
        let n = g.interior();
        let nu = 0.7f64;
        let op = SpectralOperator::laplacian_1d(g, nu).unwrap();
        let v: Vec<f64> = (0..n).map(|i| ((i as f64) * 1.3).cos()).collect();
        let got = op.apply(&v).unwrap();
        let scale = nu * (g.n_sub() * g.n_sub()) as f64;
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { v[i - 1] };
            let right = if i + 1 == n { 0.0 } else { v[i + 1] };
            let want = scale * (left - 2.0 * v[i] + right);
            assert!((got[i] - want).abs() < 1e-9, "i={i}");
        }
    }

    #[test]
    fn apply_matches_stencil_2d_and_parts_sum() {
        let g = Grid::square(6).unwrap();
        let n = g.interior();
        let nu = 0.3f64;
        let full = SpectralOperator::laplacian_2d(g, nu).unwrap();
        let split = SplitOperator::laplacian_2d(g, nu).unwrap();
        let v: Vec<f64> = (0..n * n).map(|i| ((i as f64) * 0.37).sin()).collect();
        let got = full.apply(&v).unwrap();
        let scale = nu * (g.n_sub() * g.n_sub()) as f64;
        for iy in 0..n {
            for ix in 0..n {
                let idx = iy * n + ix;
                let at = |jx: isize, jy: isize| -> f64 {
                    if jx < 0 || jy < 0 || jx >= n as isize || jy >= n as isize {
                        0.0
                    } else {
                        v[jy as usize * n + jx as usize]
                    }
                };
                let want = scale
                    * (at(ix as isize - 1, iy as isize)
                        + at(ix as isize + 1, iy as isize)
                        + at(ix as isize, iy as isize - 1)
                        + at(ix as isize, iy as isize + 1)
                        - 4.0 * v[idx]);
                assert!((got[idx] - want).abs() < 1e-8, "ix={ix} iy={iy}");
            }
        }
        let p1 = split.first().apply(&v).unwrap();
        let p2 = split.second().apply(&v).unwrap();
        for idx in 0..n * n {
            assert!((p1[idx] + p2[idx] - got[idx]).abs() < 1e-8);
        }
    }

    #[test]
    fn diagonal_operator_multiplies_entrywise() {
        let op = SpectralOperator::diagonal(vec![-1.0f64, -2.0, 3.0]).unwrap();
        let got = op.apply(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(got, vec![-2.0, -4.0, 6.0]);
        assert!(SpectralOperator::<f64>::diagonal(vec![]).is_err());
        assert!(SpectralOperator::diagonal(vec![f64::NAN]).is_err());
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = Grid::line(4).unwrap();
        let op = SpectralOperator::laplacian_1d(g, 1.0f64).unwrap();
        assert!(matches!(
            op.apply(&[1.0, 2.0]),
            Err(Error::ShapeMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn dense_matrix_is_symmetric_and_consistent() {
        let g = Grid::line(8).unwrap();
        let op = SpectralOperator::laplacian_1d(g, 1.0f64).unwrap();
        let mat = op.dense_matrix().unwrap();
        let n = op.len();
        for i in 0..n {
            for j in 0..n {
                assert!((mat[(i, j)] - mat[(j, i)]).abs() < 1e-9);
            }
        }
        let v: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let via_op = op.apply(&v).unwrap();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += mat[(i, j)] * v[j];
            }
            assert!((acc - via_op[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_of_sine_mode() {
        let g = Grid::line(256).unwrap();
        let n = g.interior();
        let pi = std::f64::consts::PI;
        let v: Vec<f64> = (0..n).map(|i| (pi * (i + 1) as f64 / 256.0).sin()).collect();
        let dv = gradient_1d(&g, &v).unwrap();
        let mut worst = 0.0f64;
        for i in 0..n {
            let x = (i + 1) as f64 / 256.0;
            worst = worst.max((dv[i] - pi * (pi * x).cos()).abs());
        }
        assert!(worst < 1e-3, "worst={worst}");
    }

    #[test]
    fn gradient_2d_separates_directions() {
        let g = Grid::square(64).unwrap();
        let n = g.interior();
        let pi = std::f64::consts::PI;
        let mut v = vec![0.0f64; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let (x, y): (f64, f64) = g.node(iy * n + ix);
                v[iy * n + ix] = (pi * x).sin() * (pi * y).sin();
            }
        }
        let (dx, dy) = gradient_2d(&g, &v).unwrap();
        let mut worst = 0.0f64;
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                let (x, y): (f64, f64) = g.node(iy * n + ix);
                let ex = pi * (pi * x).cos() * (pi * y).sin();
                let ey = pi * (pi * x).sin() * (pi * y).cos();
                worst = worst.max((dx[iy * n + ix] - ex).abs());
                worst = worst.max((dy[iy * n + ix] - ey).abs());
            }
        }
        assert!(worst < 5e-3, "worst={worst}");
    }
}
