use nlkf::FilterError;

#[derive(Debug, thiserror::Error)]
pub enum ReproError {
    #[error("invalid scenario {label}: {reason}")]
    Scenario { label: String, reason: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("config: {0}")]
    ConfigRead(#[from] toml::de::Error),
    #[error("config: {0}")]
    ConfigWrite(#[from] toml::ser::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ReproError> = std::result::Result<T, E>;
