use thiserror::Error;

/// Errors raised by the enumeration engine.
///
/// Sieve rejections (a degree that fails integrality, a candidate that fails a
/// filter) are ordinary outcomes and never surface through this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sub-check failed: {0}")]
    SubCheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
