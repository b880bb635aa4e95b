use std::fmt;

/// Error type shared by every operator in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the operation
    /// (e.g. an order `a <= -1`, an exponent outside `(0, N/2)`).
    Domain(String),
    /// Two operands cannot be combined (dimension or grid mismatch).
    Mismatch(String),
    /// A requested tolerance or resource cap cannot be met
    /// (e.g. truncation radius capped, imaginary residue too large).
    Tolerance(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Mismatch(msg) => write!(f, "mismatch: {msg}"),
            Error::Tolerance(msg) => write!(f, "tolerance error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::Mismatch(msg.into())
}
