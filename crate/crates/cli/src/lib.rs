//! Command-line harness: config-driven convergence studies, defect studies,
//! single integrations, and a phi table, all emitting reproducible CSV.

use std::path::PathBuf;

pub mod config;
pub mod emit;
pub mod pipeline;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("solution diverged at t = {t} (step {step})")]
    Diverged { t: f64, step: usize },

    #[error(transparent)]
    Core(#[from] exprk_core::Error),
}

impl CliError {
    /// 2 config or flag problem, 3 divergence, 4 filesystem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Diverged { .. } => 3,
            CliError::Core(exprk_core::Error::Divergence { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }
}
