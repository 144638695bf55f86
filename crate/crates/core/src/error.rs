use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("edge parameter for ({0}, {1}) is zero")]
    ZeroParameter(usize, usize),
    #[error("no entry supplied for edge ({0}, {1})")]
    MissingEdge(usize, usize),
    #[error("({0}, {1}) is not an edge of the model")]
    NotAnEdge(usize, usize),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("nonpositive diagonal entry at node {0}")]
    NonPositiveDiagonal(usize),
    #[error("matrix has a negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),
    #[error("invalid permutation for edge ({0}, {1})")]
    InvalidPermutation(usize, usize),
    #[error("message state contains unbounded curvature on edge {0}")]
    UnboundedMessage(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "power iteration did not converge after {iterations} iterations (best estimate {estimate})"
    )]
    NoConvergence { iterations: usize, estimate: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
