use thiserror::Error;

/// Failures that stop a command before it produces a verdict.
///
/// Exit codes: 2 for usage, parse and validation problems, 3 when a resource
/// cap is hit. Domain-negative verdicts are not errors; they exit with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid market: {0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
    #[error("resource cap: {0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Cap(_) => 3,
            _ => 2,
        }
    }
}
