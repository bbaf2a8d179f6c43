//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A template catalog is missing or malformed.
    #[error("catalog error: {0}")]
    Catalog(String),

    /// A configuration value failed validation. The string names the field.
    #[error("config error: field `{field}`: {message}")]
    Config { field: String, message: String },

    /// A serialized record could not be parsed. Names the offending field
    /// when it can be identified.
    #[error("parse error: {0}")]
    Parse(String),

    /// A record violated a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// The request stream itself is inconsistent (e.g. duplicate session id),
    /// which indicates a generation bug rather than bad traffic.
    #[error("stream integrity error: {0}")]
    StreamIntegrity(String),

    /// Replica storage failed during provisioning or execution.
    #[error("storage error: {0}")]
    Storage(#[from] rusqlite::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
