use thiserror::Error;

use crate::spec::SpecError;

/// Failure classes, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical consistency failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Spec(_) | CliError::Input(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}
