use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("ill-conditioned frame (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid shape mismatch: {0}")]
    Shape(String),

    #[error("tile frequency box exceeds the representable band: {0}")]
    OutOfBand(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size bound {mu:.6e} is below the measured size {size:.6e} (witness tiles {witness:?})")]
    SizeBound {
        mu: f64,
        size: f64,
        witness: Vec<usize>,
    },

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
