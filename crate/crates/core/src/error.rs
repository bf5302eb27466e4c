use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input data: wrong length, non-finite samples, inconsistent
    /// decomposition layout.
    #[error("invalid input: {0}")]
    Input(String),
    /// A parameter outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A numerical routine produced a non-finite or impossible value.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
