use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FnsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("elliptic isometry: |trace| = {0} < 2")]
    Elliptic(f64),
    #[error("out of range: {0}")]
    Range(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = FnsError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FnsError::Domain(msg.into()))
}
