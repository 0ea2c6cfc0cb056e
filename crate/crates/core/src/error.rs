use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpcaError>;

#[derive(Debug, Error)]
pub enum SpcaError {
    #[error("{path}: row {row}, column {col}: cannot parse {cell:?} as a number")]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        cell: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("write error: {0}")]
    Write(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Input data rejected by instance validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// Caller violated a precondition (shape, symmetry, index range).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no feasible dual certificate after exhausting the inflation schedule (best residual {best_residual:e})")]
    Certificate { best_residual: f64 },

    #[error("enumeration refused: C({p}, {k}) = {count} exceeds the budget of {budget} subsets")]
    Budget {
        p: usize,
        k: usize,
        count: u128,
        budget: u128,
    },

    #[error("cannot build relaxation: {0}")]
    Build(String),

    #[error("unknown dataset {name:?}; available: {}", available.join(", "))]
    UnknownDataset {
        name: String,
        available: Vec<&'static str>,
    },
}
