use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("phi order {k} exceeds K_MAX = {}", crate::phi::K_MAX)]
    UnsupportedOrder { k: usize },

    #[error("non-finite input: {what}")]
    NonFinite { what: &'static str },

    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("dense reference backend limited to n + k <= {max}, got {got}")]
    ReferenceScale { max: usize, got: usize },

    #[error("quadrature did not converge: error estimate {achieved:e} above tolerance {tol:e}")]
    OracleConvergence { tol: f64, achieved: f64 },

    #[error("solution diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
