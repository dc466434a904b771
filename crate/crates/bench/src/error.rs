use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] mmv_core::Error),
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

impl BenchError {
    /// Process exit code: 2 for numerical or regime failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Core(e) if e.is_numeric() => 2,
            _ => 1,
        }
    }
}
