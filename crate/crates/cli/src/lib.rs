//! Experiment configuration, validation, and pipeline orchestration behind
//! the `simbias` binary.

pub mod config;
pub mod pipeline;

use std::fmt;

/// Errors split by exit code: usage problems (bad flags, bad config) exit
/// with 2, runtime failures with 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<simbias_core::Error> for CliError {
    fn from(e: simbias_core::Error) -> Self {
        use simbias_core::Error as E;
        match &e {
            E::InvalidArgument(_) | E::InvalidSymbol { .. } | E::EmptyInput => {
                CliError::Usage(format!("core: {e}"))
            }
            _ => CliError::Runtime(format!("core: {e}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
