use thiserror::Error;

use kickfid_core::Error as CoreError;

/// Failure classes of a run, each with its process exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let msg = err.to_string();
        match err {
            CoreError::Config(_)
            | CoreError::NonElliptic(_)
            | CoreError::DomainTooSmall { .. }
            | CoreError::Argument(_) => CliError::Config(msg),
            CoreError::Regime(_)
            | CoreError::Resolution(_)
            | CoreError::NoPeak { .. }
            | CoreError::Leak { .. }
            | CoreError::Shape(_) => CliError::Numerical(msg),
            CoreError::Io(_) => CliError::Io(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
