use thiserror::Error;

/// Errors raised by the bound calculators, series primitives and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or bound diverges; the payload names the violated condition.
    #[error("divergent: {0}")]
    Divergent(String),
    /// Exact arithmetic requested outside its supported range.
    #[error("range error: {0}")]
    Range(String),
    /// Malformed or missing input.
    #[error("invalid input: {0}")]
    Input(String),
    /// An empirical functional overflowed `f64`.
    #[error("overflow: {0}")]
    Overflow(String),
    /// A truncation level does not meet the requested tail tolerance.
    #[error("truncation: {0}")]
    Truncation(String),
    /// A coefficient or objective evaluated to a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn divergent<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Divergent(msg.into()))
}
