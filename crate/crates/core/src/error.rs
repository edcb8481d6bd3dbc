use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ForecastError>;

#[derive(Debug, Error)]
pub enum ForecastError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate target: |{value}| below zero guard at entry {index}")]
    DegenerateTarget { index: usize, value: f64 },

    #[error("degenerate actual value: |{value}| below zero guard at entry {index}")]
    DegenerateActual { index: usize, value: f64 },

    #[error("degenerate anchor: entry {index} is {value}, anchors must be strictly positive")]
    DegenerateAnchor { index: usize, value: f64 },

    #[error("degenerate anchors in samples {samples:?}")]
    DegenerateAnchorSamples { samples: Vec<usize> },

    #[error("sample has no anchor but the artifact decodes against one")]
    MissingAnchor,

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("insufficient history: {lag} unavailable for {date}")]
    InsufficientHistory { lag: String, date: String },

    #[error("schema mismatch: expected {expected}, got {actual}")]
    Schema { expected: String, actual: String },

    #[error("need at least {needed} values, got {got}")]
    Arity { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("scenario produced no windows: {0}")]
    EmptyScenario(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ForecastError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ForecastError::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse class used by front ends to pick an exit status.
    pub fn class(&self) -> ErrorClass {
        match self {
            ForecastError::Diverged { .. } => ErrorClass::Divergence,
            ForecastError::Config(_) | ForecastError::Parameter(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Divergence,
}
