use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural invariant of the system description is violated.
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("codebook error: {0}")]
    Codebook(String),

    #[error("bit vector has length {got}, expected {expected}")]
    BitLength { expected: usize, got: usize },

    #[error("message index out of range: {0}")]
    MessageRange(String),

    /// The ML search space exceeds the configured guard.
    #[error("ML search space of {hypotheses} hypotheses exceeds guard {guard}")]
    Guard { hypotheses: f64, guard: u64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
