use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("cannot read config {path}: {source}")]
    ConfigRead { path: PathBuf, source: std::io::Error },

    #[error("cannot parse config {path}: {source}")]
    ConfigParse { path: PathBuf, source: serde_json::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] bqec_core::Error),

    #[error("{0}")]
    Solver(String),

    #[error("convergence gate failed: {0}")]
    Gate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use bqec_core::Error as E;
        match self {
            CliError::Validation(_) | CliError::ConfigRead { .. } | CliError::ConfigParse { .. } => 1,
            CliError::Core(
                E::InvalidDimension { .. }
                | E::DimensionMismatch { .. }
                | E::ShapeMismatch(_)
                | E::ParameterRange { .. }
                | E::Truncation { .. }
                | E::InvalidCode { .. }
                | E::UnsupportedOrder(_),
            ) => 1,
            CliError::Core(_) | CliError::Solver(_) | CliError::Write { .. } => 2,
            CliError::Gate(_) => 3,
        }
    }
}
