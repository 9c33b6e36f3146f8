use thiserror::Error;

/// Failure modes shared by the solvers, generators and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("singular curve: {0}")]
    SingularCurve(String),

    #[error("tracking stalled: {0}")]
    TrackingStalled(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("anomaly: {0}")]
    Anomaly(String),

    #[error("refinement failed: {0}")]
    RefinementFailed(String),

    #[error("tensor is reducible")]
    Reducible,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Input,
    Stalled,
    Budget,
    Anomaly,
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::DimensionMismatch { .. }
            | Error::Domain(_)
            | Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::Reducible
            | Error::Io(_)
            | Error::Json(_) => Category::Input,
            Error::SingularCurve(_) | Error::TrackingStalled(_) | Error::RefinementFailed(_) => Category::Stalled,
            Error::Budget(_) => Category::Budget,
            Error::Anomaly(_) => Category::Anomaly,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
