//! Minplus matrices, precedence graphs and the linear eigenvalue problem.
//!
//! For a strongly connected precedence graph the eigenvalue of `A` is the
//! minimum cycle mean, `λ = min_c |c|_w / |c|_l`.

mod cycle;
mod eigen;
mod graph;
mod matrix;

use thiserror::Error;

pub use cycle::{cycle_weight, karp_value, min_mean_cycle, CycleStats};
pub use eigen::{eigen_pair, eigen_residual, eigenvector, EigenPair};
pub use graph::PrecedenceGraph;
pub use matrix::{MinPlusMatrix, MinPlusVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TropicalError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{token}`")]
    Parse { line: usize, token: String },
    #[error("empty matrix")]
    Empty,
    #[error("precedence graph is not strongly connected: node {to} is not reachable from node {from}")]
    NotStronglyConnected { from: usize, to: usize },
    #[error("edge {from} -> {to} has weight -inf")]
    NegInfEdge { from: usize, to: usize },
    #[error("closure of A - λ diverges: negative loop through node {node}")]
    ClosureDiverges { node: usize },
    #[error("{0} is not an eigenvalue: no critical node")]
    NotAnEigenvalue(f64),
    #[error("internal consistency failure: {0}")]
    Internal(&'static str),
}
