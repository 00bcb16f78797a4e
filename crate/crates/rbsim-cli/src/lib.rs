//! Command-line front end: configs in, plans/records/reports out.
//!
//! The library half of the binary so the command implementations stay
//! testable without spawning processes.  Errors carry their exit class:
//! anything wrong with how the tool was invoked (bad flags, bad config,
//! unknown experiment selector) is a usage error and exits 1; anything
//! wrong with the data it was pointed at (unreadable or mismatched files,
//! fits that cannot converge) exits 2.  Success is 0.

pub mod commands;
pub mod config;
pub mod formats;

/// Failure classes, mapped one-to-one onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// The invocation itself was wrong; fix the flags or the config.
    Usage(String),
    /// The inputs were wrong or the analysis could not complete.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rbsim_core::Error> for CliError {
    fn from(err: rbsim_core::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
