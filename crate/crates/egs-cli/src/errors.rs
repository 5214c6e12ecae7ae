use std::fmt;

/// Failure categories aligned with the process exit codes: usage mistakes
/// exit 1, data and computation problems exit 2, and a failed verification
/// run exits 3.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags, flag combinations, or parameter values.
    Usage(String),
    /// Unreadable or malformed input, or a computation that failed on
    /// otherwise valid parameters.
    Data(String),
    /// The axiom suite found a violation where none was expected, or the
    /// counterexample search exhausted its budget where one was expected.
    Verification(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Data(msg) => write!(f, "{msg}"),
            CliError::Verification(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<egs_core::ParamError> for CliError {
    fn from(err: egs_core::ParamError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<egs_core::MeasureError> for CliError {
    fn from(err: egs_core::MeasureError) -> Self {
        match err {
            egs_core::MeasureError::Param(p) => CliError::Usage(p.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
