//! Exponential Runge-Kutta and splitting integrators for semilinear
//! parabolic problems u' = A u + f(t, u) whose linear part is diagonalized
//! by a fast sine transform.
//!
//! The pieces:
//!
//! - [`phi`]: the phi functions that weight exponential integrators, as
//!   validated scalars, combinations, and spectral applications, with an
//!   adaptive quadrature oracle for cross-checking.
//! - [`operators`]: Dirichlet grids, stencil Laplacians in 1D and 2D, their
//!   directional splitting, and explicitly diagonal operators.
//! - [`dense`]: an O(n^3) matrix-exponential reference backend.
//! - [`tableau`]: scheme coefficients as phi combinations, split product
//!   weights, and order-condition checks.
//! - [`stepper`]: the one-step maps and fixed-step integration driver.
//! - [`problems`]: heat, Allen-Cahn, advection, and exactly solvable forced
//!   linear problems with their initial data recipes.
//! - [`analysis`]: grid norms, order fitting, convergence studies, and the
//!   study of the gap between split and unsplit phi functions.
//!
//! Everything is generic over the scalar through [`Real`] (f64 and f32);
//! the `*64` aliases fix the common choice.

pub mod analysis;
pub mod dense;
pub mod error;
pub mod operators;
pub mod phi;
pub mod problems;
pub mod scalar;
pub mod stepper;
pub mod tableau;
mod transform;

pub use analysis::{
    fit_order, norm, run_convergence_study, split_defect_multiplier, split_defect_study,
    ConvergenceReport, DefectReport, NormKind, OrderFit, Reference, StudyPoint, NOISE_FLOOR,
};
pub use error::{Error, Result};
pub use operators::{gradient_1d, gradient_2d, Grid, SpectralOperator, SplitOperator};
pub use phi::{
    apply_combo_spectral, apply_spectral, phi_quadrature_oracle, phi_scalar, PhiCombo, PhiTerm,
    K_MAX,
};
pub use problems::{make_initial_data, InitialData, LinearPart, Nonlinearity, Problem};
pub use scalar::Real;
pub use stepper::{integrate, integrate_observed, Scheme, StepRecord, Stepper};
pub use tableau::{
    ExpRkTableau, OrderConditionReport, SplitTableau, SplitTerm, SplitWeight,
};

pub type PhiCombo64 = PhiCombo<f64>;
pub type SpectralOperator64 = SpectralOperator<f64>;
pub type SplitOperator64 = SplitOperator<f64>;
pub type ExpRkTableau64 = ExpRkTableau<f64>;
pub type SplitTableau64 = SplitTableau<f64>;
pub type Problem64 = Problem<f64>;
pub type Stepper64<'p> = Stepper<'p, f64>;
pub type ConvergenceReport64 = ConvergenceReport<f64>;
pub type DefectReport64 = DefectReport<f64>;
