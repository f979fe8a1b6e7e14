use std::io;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for failed checks and numerical failures.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for a parameter outside the admitted range.
pub const EXIT_DOMAIN: i32 = 2;
/// Exit status when a dyadic ray ended at a slit tip.
pub const EXIT_DYADIC_TIP: i32 = 3;
/// Exit status when a resource cap stopped the computation.
pub const EXIT_CAP: i32 = 4;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] juliagreen_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{failed} verification check(s) failed")]
    Verification { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(juliagreen_core::Error::Domain { .. }) => EXIT_DOMAIN,
            CliError::Core(juliagreen_core::Error::CapExceeded { .. }) => EXIT_CAP,
            _ => EXIT_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
