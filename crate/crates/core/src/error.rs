use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("edge list {0} contains no usable edges")]
    EmptyGraph(PathBuf),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("empty batch")]
    EmptyBatch,

    #[error("budget {budget} admits no nonempty seed set (cheapest node costs {min_cost})")]
    InfeasibleBudget { budget: f64, min_cost: f64 },

    #[error("checkpoint was built for {expected} nodes but the graph has {got}")]
    NodeCountMismatch { expected: usize, got: usize },

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(expected: impl ToString, got: impl ToString) -> Error {
    Error::Shape {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
