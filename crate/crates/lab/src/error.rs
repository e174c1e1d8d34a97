use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Bad configuration; `field` is the dotted path of the offending entry.
    #[error("usage error at `{field}`: {message}")]
    Usage { field: String, message: String },

    #[error(transparent)]
    Core(#[from] prs_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    pub fn usage(field: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Usage {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
