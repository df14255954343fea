use std::process::ExitCode;

use funklib::FunkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Gate(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Gate(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
        })
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }
}

impl From<FunkError> for CliError {
    fn from(e: FunkError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Parse(e.to_string())
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
