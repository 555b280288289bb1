//! Additively homogeneous maps `f(λ + x) = λ + f(x)`: trajectories, growth
//! rates, the eigenvalue-to-fixed-point reduction and empirical measures.

mod affine;
mod fixed_point;
mod map;
pub mod tent;
mod trajectory;

use thiserror::Error;

pub use affine::{eigen_affine_standard, AffineEigen};
pub use fixed_point::{
    damped_iteration, fixed_point_solve, reduce_eigenproblem, reduce_pa, FixedPoint, FixedPointReport,
    IterationOutcome, PaExpr, PaMap, ReducedMap, ReducedPa, Strategy, FIXED_POINT_TOL,
};
pub use map::{probe_homogeneity, ClosureMap, HomogeneityReport, HomogeneousMap, Shift};
pub use trajectory::{
    empirical_measure, estimate_from, growth_rate, iterate, kolmogorov_uniform, measure_average, normalize, run,
    EmpiricalMeasure, GrowthRateEstimate, IterateOptions, TrajectoryRecord,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state left the finite range at step {step}, coordinate {coord}")]
    Divergence { step: usize, coord: usize },
    #[error("trajectory is unbounded (max |y| = {0})")]
    Unbounded(f64),
    #[error("measure needs an unstrided trajectory with at least two states")]
    Strided,
    #[error("kernel of A - I has dimension {0}, expected 1")]
    KernelDimension(usize),
    #[error("need K > K0, got K0 = {k0}, K = {k}")]
    BadHorizon { k0: usize, k: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
