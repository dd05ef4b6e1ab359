//! Command implementations behind the `factorid` binary.
//!
//! Exit codes: `0` the rule holds / the run completed, `1` the rule fails
//! or no decomposition exists, `2` input or system error.

pub mod bench;
pub mod check;
pub mod filter;
pub mod labels;
pub mod witness;

use std::fmt;
use std::io;

use factorid_core::{IdentifyError, PatternError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RULE_FAILS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Io { context: String, source: io::Error },
    Pattern(PatternError),
    Identify(IdentifyError),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Pattern(e) => write!(f, "invalid pattern: {e}"),
            CliError::Identify(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<PatternError> for CliError {
    fn from(e: PatternError) -> Self {
        CliError::Pattern(e)
    }
}

impl From<IdentifyError> for CliError {
    fn from(e: IdentifyError) -> Self {
        CliError::Identify(e)
    }
}

pub fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Maps a command result onto the process exit code, reporting errors on
/// standard error.
pub fn exit_code(result: Result<i32, CliError>) -> i32 {
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
