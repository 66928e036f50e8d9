//! Error type mapping every failure onto the documented exit codes.

use collapse_kit::criteria::CriteriaError;
use collapse_kit::energy::EnergyError;
use collapse_kit::jang::JangError;
use collapse_kit::radial_data::DataError;
use thiserror::Error;

/// CLI failure; the variant decides the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad configuration, unreadable or invalid data:
    /// exit code 1.
    #[error("{0}")]
    Usage(String),
    /// A verification suite or soundness sweep failed: exit code 2.
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verify(_) => 2,
        }
    }
}

impl From<DataError> for CliError {
    fn from(err: DataError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<CriteriaError> for CliError {
    fn from(err: CriteriaError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<JangError> for CliError {
    fn from(err: JangError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<EnergyError> for CliError {
    fn from(err: EnergyError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}
