use std::process::ExitCode;

use pppcov_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
    #[error("{failed} validation criteria failed")]
    ValidationFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::ValidationFailed { .. } => 2,
            CliError::Io(_) => 3,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(msg) => CliError::Config(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
