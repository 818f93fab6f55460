//! Library side of the `etmof` command-line harness.

pub mod campaign;
pub mod catalog;
pub mod config;
pub mod fronts;
pub mod plot;
pub mod report;
pub mod rundir;

use std::fmt;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Malformed or inconsistent input (exit 2).
    BadInput(anyhow::Error),
    /// Output already present and `--force` not given (exit 3).
    Exists(String),
    /// Anything else, including failed campaign cells (exit 1).
    Failed(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::BadInput(_) => 2,
            Failure::Exists(_) => 3,
            Failure::Failed(_) => 1,
        }
    }

    pub fn bad(e: impl Into<anyhow::Error>) -> Self {
        Failure::BadInput(e.into())
    }

    pub fn failed(e: impl Into<anyhow::Error>) -> Self {
        Failure::Failed(e.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::BadInput(e) => write!(f, "invalid input: {e:#}"),
            Failure::Exists(p) => write!(f, "refusing to overwrite {p} (pass --force to replace it)"),
            Failure::Failed(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for Failure {}

pub type HResult<T> = std::result::Result<T, Failure>;

/// `ETMOF<id>` directory and label form.
pub fn instance_name(id: usize) -> String {
    format!("ETMOF{id}")
}
