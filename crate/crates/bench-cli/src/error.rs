use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("every run of {scheme} degenerated")]
    AllRunsDegenerate { scheme: String },
    #[error(transparent)]
    Filter(#[from] smc_core::SmcError),
    #[error(transparent)]
    Tracking(#[from] tracking_model::TrackingError),
    #[error(transparent)]
    Oracle(#[from] exact_oracle::OracleError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Tracking(tracking_model::TrackingError::Config(_)) => 2,
            Self::Oracle(exact_oracle::OracleError::TooLarge { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
