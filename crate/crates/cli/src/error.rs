use qrw_core::QrwError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Compute(#[from] QrwError),

    #[error("disagreement: {0}")]
    Disagreement(String),
}

impl CliError {
    /// 2 for bad input, 1 for failed computations, 3 when `compare` finds a gap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Compute(QrwError::Usage(_)) => 2,
            CliError::Compute(QrwError::NonUnitary { .. }) => 2,
            CliError::Io { .. } | CliError::Compute(_) => 1,
            CliError::Disagreement(_) => 3,
        }
    }
}
