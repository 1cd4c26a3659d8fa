use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rejected record at line {line}: {reason}")]
    Record { line: usize, reason: String },

    #[error("ego gap: no ego state within {tolerance} s of t = {t}")]
    EgoGap { t: f64, tolerance: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("training diverged: non-finite loss {loss} in epoch {epoch}")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    #[error("scorer failed on fold {fold}: {reason}")]
    Scorer { fold: usize, reason: String },

    #[error("untrained ensemble member: {0}")]
    MissingMember(String),

    #[error("stage dependency missing: {0}")]
    StageDependency(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: String, expected: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
