//! Semilinear initial value problems u' = A u + f(t, u) on Dirichlet grids:
//! the linear part, the nonlinearity, the starting data, and the exact
//! solution when one is available in closed form.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operators::{gradient_2d, Grid, SpectralOperator, SplitOperator};
use crate::phi::apply_spectral;
use crate::scalar::{all_finite, Real};

/// The linear part, either whole or with an explicit splitting attached.
#[derive(Clone)]
pub enum LinearPart<T> {
    Whole(SpectralOperator<T>),
    Split(SplitOperator<T>),
}

impl<T: Real> LinearPart<T> {
    pub fn full(&self) -> &SpectralOperator<T> {
        match self {
            LinearPart::Whole(op) => op,
            LinearPart::Split(op) => op.full(),
        }
    }

    pub fn split(&self) -> Option<&SplitOperator<T>> {
        match self {
            LinearPart::Whole(_) => None,
            LinearPart::Split(op) => Some(op),
        }
    }
}

impl<T> From<SpectralOperator<T>> for LinearPart<T> {
    fn from(op: SpectralOperator<T>) -> Self {
        LinearPart::Whole(op)
    }
}

impl<T> From<SplitOperator<T>> for LinearPart<T> {
    fn from(op: SplitOperator<T>) -> Self {
        LinearPart::Split(op)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Nonlinearity<T> {
    Zero,
    /// u - u^3.
    AllenCahn,
    /// -u (du/dx + du/dy); 2D grids only.
    Burgers,
    /// g0 + t g1, independent of u; keeps the problem exactly solvable.
    AffineForcing { g0: Vec<T>, g1: Vec<T> },
}

/// Number of modes the rough random initial data superposes.
const FOURIER_MODES: usize = 32;

/// Recipes for initial data on a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialData {
    /// Tent 1 - 2|x - 1/2|, tensorized across dimensions.
    Hat,
    /// 1 - 2 max(|x - 1/2|, |y - 1/2|); 2D only. Lipschitz but not C^1,
    /// with a kink that is not aligned to the coordinate splitting.
    Pyramid,
    /// Random sine series with coefficients xi_j j^-(smoothness+1),
    /// sup-normalized on the grid. Lands in the Hoelder class of the given
    /// exponent but no better.
    FourierDecay { smoothness: f64, seed: u64 },
    /// 0.9 sin(pi x) (times sin(pi y) in 2D): smooth and compatible with the
    /// boundary conditions to all orders.
    SmoothCompatible,
}

pub fn make_initial_data<T: Real>(spec: InitialData, grid: &Grid) -> Result<Vec<T>> {
    let total = grid.total();
    let mut u0 = vec![T::zero(); total];
    match spec {
        InitialData::Hat => {
            let tent = |x: T| T::one() - T::of(2.0) * (x - T::of(0.5)).abs();
            for (idx, slot) in u0.iter_mut().enumerate() {
                let (x, y) = grid.node::<T>(idx);
                *slot = if grid.dims() == 1 { tent(x) } else { tent(x) * tent(y) };
            }
        }
        InitialData::Pyramid => {
            if grid.dims() != 2 {
                return Err(Error::invalid("pyramid data needs a 2D grid"));
            }
            for (idx, slot) in u0.iter_mut().enumerate() {
                let (x, y) = grid.node::<T>(idx);
                let r = (x - T::of(0.5)).abs().max((y - T::of(0.5)).abs());
                *slot = T::one() - T::of(2.0) * r;
            }
        }
        InitialData::FourierDecay { smoothness, seed } => {
            if !(smoothness > 0.0 && smoothness < 2.0) {
                return Err(Error::invalid(format!(
                    "smoothness must lie in (0, 2), got {smoothness}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<T> = (1..=FOURIER_MODES)
                .map(|j| {
                    let xi = 2.0 * rng.random::<f64>() - 1.0;
                    T::of(xi * (j as f64).powf(-(smoothness + 1.0)))
                })
                .collect();
            for (idx, slot) in u0.iter_mut().enumerate() {
                let (x, y) = grid.node::<T>(idx);
                let mut acc = T::zero();
                for (j, &cj) in coeffs.iter().enumerate() {
                    let jpi = T::of_usize(j + 1) * T::PI();
                    let mode = if grid.dims() == 1 {
                        (jpi * x).sin()
                    } else {
                        (jpi * x).sin() * (jpi * y).sin()
                    };
                    acc = acc + cj * mode;
                }
                *slot = acc;
            }
            let sup = u0.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if sup == T::zero() {
                return Err(Error::invalid("random data vanished on the grid"));
            }
            for v in u0.iter_mut() {
                *v = *v / sup;
            }
        }
        InitialData::SmoothCompatible => {
            let amp = T::of(0.9);
            for (idx, slot) in u0.iter_mut().enumerate() {
                let (x, y) = grid.node::<T>(idx);
                let mode = if grid.dims() == 1 {
                    (T::PI() * x).sin()
                } else {
                    (T::PI() * x).sin() * (T::PI() * y).sin()
                };
                *slot = amp * mode;
            }
        }
    }
    Ok(u0)
}

/// A fully assembled initial value problem.
#[derive(Clone)]
pub struct Problem<T> {
    label: String,
    linear: LinearPart<T>,
    nonlin: Nonlinearity<T>,
    u0: Vec<T>,
}

impl<T: Real> Problem<T> {
    pub fn new(
        label: impl Into<String>,
        linear: impl Into<LinearPart<T>>,
        nonlin: Nonlinearity<T>,
        u0: Vec<T>,
    ) -> Result<Self> {
        let linear = linear.into();
        let total = linear.full().len();
        if u0.len() != total {
            return Err(Error::ShapeMismatch { expected: total, got: u0.len() });
        }
        if !all_finite(&u0) {
            return Err(Error::NonFinite { what: "initial data" });
        }
        match &nonlin {
            Nonlinearity::Burgers => {
                if linear.full().grid().dims() != 2 {
                    return Err(Error::invalid("this advection form needs a 2D grid"));
                }
            }
            Nonlinearity::AffineForcing { g0, g1 } => {
                if g0.len() != total || g1.len() != total {
                    return Err(Error::ShapeMismatch {
                        expected: total,
                        got: g0.len().max(g1.len()),
                    });
                }
                if !all_finite(g0) || !all_finite(g1) {
                    return Err(Error::NonFinite { what: "forcing data" });
                }
            }
            _ => {}
        }
        Ok(Problem { label: label.into(), linear, nonlin, u0 })
    }

    /// Pure diffusion u' = nu Lap u. 2D grids carry the directional split so
    /// every scheme can run.
    pub fn heat(grid: Grid, nu: T, u0: Vec<T>) -> Result<Self> {
        let linear: LinearPart<T> = match grid.dims() {
            1 => SpectralOperator::laplacian_1d(grid, nu)?.into(),
            _ => SplitOperator::laplacian_2d(grid, nu)?.into(),
        };
        Self::new("heat", linear, Nonlinearity::Zero, u0)
    }

    /// u' = eps^2 Lap u + u - u^3.
    pub fn allen_cahn(grid: Grid, eps: T, u0: Vec<T>) -> Result<Self> {
        if !eps.is_finite() || eps <= T::zero() {
            return Err(Error::invalid(format!(
                "interface parameter must be positive, got {eps}"
            )));
        }
        let nu = eps * eps;
        let linear: LinearPart<T> = match grid.dims() {
            1 => SpectralOperator::laplacian_1d(grid, nu)?.into(),
            _ => SplitOperator::laplacian_2d(grid, nu)?.into(),
        };
        Self::new("allen_cahn", linear, Nonlinearity::AllenCahn, u0)
    }

    /// u' = nu Lap u - u (u_x + u_y) on a 2D grid.
    pub fn burgers(grid: Grid, nu: T, u0: Vec<T>) -> Result<Self> {
        if grid.dims() != 2 {
            return Err(Error::invalid("this advection form needs a 2D grid"));
        }
        Self::new(
            "burgers",
            SplitOperator::laplacian_2d(grid, nu)?,
            Nonlinearity::Burgers,
            u0,
        )
    }

    /// u' = A u + g0 + t g1 over any linear part; solvable in closed form.
    pub fn linear_forced(
        linear: impl Into<LinearPart<T>>,
        u0: Vec<T>,
        g0: Vec<T>,
        g1: Vec<T>,
    ) -> Result<Self> {
        Self::new("linear_forced", linear, Nonlinearity::AffineForcing { g0, g1 }, u0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn linear(&self) -> &LinearPart<T> {
        &self.linear
    }

    pub fn operator(&self) -> &SpectralOperator<T> {
        self.linear.full()
    }

    pub fn split(&self) -> Option<&SplitOperator<T>> {
        self.linear.split()
    }

    pub fn grid(&self) -> &Grid {
        self.operator().grid()
    }

    pub fn len(&self) -> usize {
        self.u0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u0.is_empty()
    }

    pub fn initial(&self) -> &[T] {
        &self.u0
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.nonlin
    }

    /// f(t, u), the non-stiff part of the right-hand side. Shapes are fixed
    /// at construction, so this cannot fail.
    pub fn rhs(&self, t: T, u: &[T]) -> Vec<T> {
        debug_assert_eq!(u.len(), self.len());
        match &self.nonlin {
            Nonlinearity::Zero => vec![T::zero(); u.len()],
            Nonlinearity::AllenCahn => u.iter().map(|&v| v - v * v * v).collect(),
            Nonlinearity::Burgers => {
                let grid = *self.grid();
                let (dx, dy) = gradient_2d(&grid, u).expect("shape fixed at construction");
                u.iter()
                    .zip(dx.iter().zip(&dy))
                    .map(|(&v, (&gx, &gy))| -v * (gx + gy))
                    .collect()
            }
            Nonlinearity::AffineForcing { g0, g1 } => {
                g0.iter().zip(g1).map(|(&a, &b)| a + t * b).collect()
            }
        }
    }

    /// Whether `exact_at` is available.
    pub fn has_exact(&self) -> bool {
        matches!(self.nonlin, Nonlinearity::Zero | Nonlinearity::AffineForcing { .. })
    }

    /// The closed-form solution at time t:
    /// e^(tA) u0 for pure diffusion, plus t phi_1(tA) g0 + t^2 phi_2(tA) g1
    /// under affine forcing.
    pub fn exact_at(&self, t: T) -> Result<Vec<T>> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::invalid(format!("time must be finite and >= 0, got {t}")));
        }
        if t == T::zero() {
            return Ok(self.u0.clone());
        }
        let op = self.operator();
        match &self.nonlin {
            Nonlinearity::Zero => apply_spectral(0, t, op, &self.u0),
            Nonlinearity::AffineForcing { g0, g1 } => {
                let mut u = apply_spectral(0, t, op, &self.u0)?;
                let p1 = apply_spectral(1, t, op, g0)?;
                let p2 = apply_spectral(2, t, op, g1)?;
                let t2 = t * t;
                for ((ui, a), b) in u.iter_mut().zip(&p1).zip(&p2) {
                    *ui = *ui + t * *a + t2 * *b;
                }
                Ok(u)
            }
            _ => Err(Error::invalid(format!(
                "problem '{}' has no closed-form solution",
                self.label
            ))),
        }
    }
}
