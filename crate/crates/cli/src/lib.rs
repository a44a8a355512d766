//! Batch interface over `fns-core`: surface files, reports, verification suites and scans.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod grid;
pub mod numfmt;
pub mod report;
pub mod scan;
pub mod schema;
pub mod suites;

use fns_core::FnsError;

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or configuration: exit 2.
    Usage(String),
    /// A check failed or the inputs are inconsistent: exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FnsError> for CliError {
    fn from(e: FnsError) -> Self {
        match e {
            FnsError::Config(_) | FnsError::Schema(_) | FnsError::Range(_) | FnsError::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
