use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed automaton text. `at` names the field, and the line when known.
    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    /// The instance exceeds what an exact routine is willing to handle.
    #[error("capacity exceeded: {what} (got {got}, limit {limit})")]
    Capacity { what: &'static str, got: u64, limit: u64 },

    #[error("zero frequency at n = {n}: increase samples or drop the point")]
    ZeroFrequency { n: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
