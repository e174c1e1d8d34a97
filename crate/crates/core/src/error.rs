use thiserror::Error;

/// Errors raised by the simulation library.
///
/// Protocol-level rejections (an `Invalid` verdict, a `⊥` reveal, an aborted
/// tomograph) are ordinary values and never surface here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} needs dimension {requested}, cap is {cap}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: usize,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("codec error: {0}")]
    Codec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::Shape {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
