use thiserror::Error;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, invalid parameters.
    #[error("{0}")]
    Usage(String),
    /// A computation produced a non-finite or otherwise unusable value.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl From<linex_shrink::Error> for CliError {
    fn from(e: linex_shrink::Error) -> Self {
        match e {
            linex_shrink::Error::Numeric(_) => Self::Numeric(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(format!("I/O error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
