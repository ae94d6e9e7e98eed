//! Library half of the benchmark CLI: argument resolution, method fitting,
//! and the command implementations. The binary in `main.rs` is a thin clap
//! wrapper over [`commands`].

pub mod commands;
pub mod config;
pub mod methods;

use std::fmt;

/// Command failures split by exit code: usage problems exit 2, runtime
/// failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(rena_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(err) => write!(f, "{err}"),
        }
    }
}

impl From<rena_core::Error> for CliError {
    fn from(err: rena_core::Error) -> Self {
        CliError::Run(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Run(rena_core::Error::Io(err))
    }
}

pub type CliResult<T> = Result<T, CliError>;
