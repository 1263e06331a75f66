use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {lhs:?} vs {rhs:?}")]
    Shape {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("row {row} of the softmax mask has no masked-in entry")]
    EmptyMaskRow { row: usize },

    #[error("adjacency row {row} has a non-positive diagonal entry")]
    MissingSelfLoop { row: usize },

    #[error("backward requires a 1x1 loss, got {rows}x{cols}")]
    NonScalarLoss { rows: usize, cols: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid record {id}: {msg}")]
    InvalidRecord { id: String, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("category pool `{0}` is empty")]
    EmptyPool(String),

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("bad file format in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("checksum mismatch in {0}")]
    Checksum(PathBuf),

    #[error("unsupported version {found} in {path} (expected {expected})")]
    Version {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("checkpoint incompatible with model config: {0}")]
    Incompatible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_err(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Error {
    Error::Shape { op, lhs, rhs }
}
