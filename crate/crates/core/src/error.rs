use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("config file {path}: {message}")]
    ConfigFile { path: PathBuf, message: String },

    #[error("index {index} outside [{min}, {max}]")]
    Index { index: i32, min: i32, max: i32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("time step {dt} exceeds CFL limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
