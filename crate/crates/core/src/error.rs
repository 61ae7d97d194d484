use thiserror::Error;

/// Errors raised by constructors and oracles.
///
/// Validation failures are not errors: validators return a report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{what} exceeds capacity: {actual} > {limit}")]
    Capacity {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
