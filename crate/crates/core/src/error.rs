use thiserror::Error;

/// Errors surfaced by the library and mapped onto CLI exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// Text input did not parse; `pos` is a 0-based byte offset.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// A matrix that had to be inverted is singular.
    #[error("singular matrix")]
    Singular,
    /// Coefficients violate the hypotheses of a parameter system.
    #[error("parameter error: {0}")]
    Param(String),
    /// Sampled ranks came too close to the number of samples.
    #[error("sample matrix saturated at {samples} samples")]
    Saturated { samples: usize },
    /// An internal invariant broke (e.g. a rewrite step budget ran out).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
