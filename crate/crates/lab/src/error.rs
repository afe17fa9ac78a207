use thiserror::Error;

/// Errors surfaced by the lab layer.
#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] semipar::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("empty point cloud")]
    EmptyCloud,
}

impl LabError {
    /// Process exit code: 2 for bad input, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(e) if e.is_precondition() => 2,
            LabError::Config(_) | LabError::EmptyCloud => 2,
            _ => 3,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
