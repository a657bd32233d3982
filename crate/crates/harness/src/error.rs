use std::fmt;

use rae_core::RaeError;

/// Failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::data(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Library errors raised while computing; input problems map to data errors.
impl From<RaeError> for CliError {
    fn from(e: RaeError) -> Self {
        match e {
            RaeError::Schema(_) | RaeError::Json(_) | RaeError::MissingTerms(_) => CliError::data(e.to_string()),
            RaeError::Domain(_) | RaeError::TooManyQubits { .. } => CliError::config(e.to_string()),
            RaeError::NoClosedForm { .. }
            | RaeError::Unidentifiable(_)
            | RaeError::Precondition(_)
            | RaeError::NonConvergence { .. } => CliError::numerical(e.to_string()),
        }
    }
}
