//! Process exit codes: 0 success, 2 validation, 3 out-of-regime, 64 usage.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad inputs or malformed files: exit 2.
    Validation(String),
    /// Series regime exceeded: exit 3.
    OutOfRegime(String),
    /// IO and similar environment failures: exit 1.
    Other(anyhow::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::OutOfRegime(_) => 3,
            CliError::Other(_) => 1,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::OutOfRegime(m) => write!(f, "{m}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl From<collapse_core::series::SeriesError> for CliError {
    fn from(e: collapse_core::series::SeriesError) -> Self {
        use collapse_core::series::SeriesError;
        match e {
            SeriesError::OutOfRegime { .. } => CliError::OutOfRegime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<collapse_core::collapse_process::ProcessError> for CliError {
    fn from(e: collapse_core::collapse_process::ProcessError) -> Self {
        use collapse_core::collapse_process::ProcessError;
        match e {
            ProcessError::Series(s) => s.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<collapse_core::kg_solver::KgError> for CliError {
    fn from(e: collapse_core::kg_solver::KgError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<collapse_core::magnitudes::MagnitudesError> for CliError {
    fn from(e: collapse_core::magnitudes::MagnitudesError) -> Self {
        use collapse_core::magnitudes::MagnitudesError;
        match e {
            MagnitudesError::Series(s) => s.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<collapse_core::wavefunction::WaveError> for CliError {
    fn from(e: collapse_core::wavefunction::WaveError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
