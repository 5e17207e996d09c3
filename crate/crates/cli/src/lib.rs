//! Experiment harness behind the `flmc` binary: configuration files, output
//! writers and one function per subcommand.
//!
//! Every command is a deterministic function of its configuration and seed.
//! Wall-clock measurements go to `timing.json` alone, so all other outputs
//! can be compared byte for byte across runs and thread counts.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

/// Failure of a command, mapped onto the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; every violation is listed.
    Validation(Vec<String>),
    /// Every replica diverged.
    Diverged(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Diverged(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(v) => {
                writeln!(f, "invalid configuration:")?;
                for msg in v {
                    writeln!(f, "  - {msg}")?;
                }
                Ok(())
            }
            CliError::Diverged(msg) => write!(f, "all replicas diverged: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<flmc::Error> for CliError {
    fn from(e: flmc::Error) -> Self {
        match e {
            flmc::Error::Divergence { .. } => CliError::Diverged(e.to_string()),
            other => CliError::Validation(vec![other.to_string()]),
        }
    }
}
