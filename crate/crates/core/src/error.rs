use thiserror::Error;

/// Errors produced by the counting library.
///
/// Variants are grouped by who is at fault: the caller (`Domain`,
/// `Contract`, `InvalidField`), the configured limits (`Capacity`), or the
/// library itself (`Inconsistent`, `OracleFailure`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{field}: {message}")]
    InvalidField { field: String, message: String },

    /// A closed form produced a non-integral or negative count.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error under the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Contract(_) | Error::InvalidField { .. } => 2,
            Error::Inconsistent(_) | Error::OracleFailure(_) => 3,
            Error::Capacity(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
