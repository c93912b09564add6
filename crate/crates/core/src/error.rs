use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input document does not match the expected schema.
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },

    /// Structurally valid input violating a domain invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        // serde_json reports the offending key in the message; keep position info.
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    }
}
