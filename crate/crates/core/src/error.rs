use thiserror::Error;

/// Failure modes shared by every module. The `op` field names the operation
/// (or pipeline stage) that rejected its input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: domain error: {msg}")]
    Domain { op: &'static str, msg: String },
    #[error("{op}: capacity exceeded: {msg}")]
    Capacity { op: &'static str, msg: String },
    #[error("{op}: validity precondition failed: {msg}")]
    Validity { op: &'static str, msg: String },
    #[error("{op}: contract violated: {msg}")]
    Contract { op: &'static str, msg: String },
    #[error("{op}: fixed-point overflow: {msg}")]
    Overflow { op: &'static str, msg: String },
    #[error("{op}: line {line}: {msg}")]
    Parse {
        op: &'static str,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub fn capacity(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Capacity { op, msg: msg.into() }
    }

    pub fn validity(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Validity { op, msg: msg.into() }
    }

    pub fn contract(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Contract { op, msg: msg.into() }
    }

    pub fn overflow(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Overflow { op, msg: msg.into() }
    }

    /// Operation or stage that raised the error.
    pub fn stage(&self) -> &'static str {
        match self {
            Error::Domain { op, .. }
            | Error::Capacity { op, .. }
            | Error::Validity { op, .. }
            | Error::Contract { op, .. }
            | Error::Overflow { op, .. }
            | Error::Parse { op, .. } => op,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
