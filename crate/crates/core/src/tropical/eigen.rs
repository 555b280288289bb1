use super::cycle::{normalized_closure, tolerance};
use super::{min_mean_cycle, MinPlusMatrix, MinPlusVector, PrecedenceGraph, TropicalError};
use crate::scalar::ExtendedReal;

/// Eigenvector of `A` for the eigenvalue `λ`.
///
/// Takes the column of `(A − λ)⁺` indexed by the smallest critical node
/// (a node whose lightest normalized loop weighs 0).
pub fn eigenvector(a: &MinPlusMatrix, lambda: f64) -> Result<MinPlusVector, TropicalError> {
    let graph = PrecedenceGraph::from_matrix(a)?;
    graph.check_strongly_connected()?;
    let tol = tolerance(a, lambda);
    let dist = normalized_closure(&graph, lambda);
    let n = graph.node_count();
    if let Some(u) = (0..n).find(|&u| dist[u][u] < -tol) {
        return Err(TropicalError::ClosureDiverges { node: u });
    }
    let j = (0..n)
        .find(|&u| dist[u][u].abs() <= tol)
        .ok_or(TropicalError::NotAnEigenvalue(lambda))?;
    Ok((0..n)
        .map(|i| {
            if i == j {
                ExtendedReal::Finite(0.0)
            } else {
                ExtendedReal::from(dist[j][i])
            }
        })
        .collect())
}

/// `max_i |(A ⊗ x)_i − (λ + x_i)|` over finite coordinates; infinite mismatch
/// yields `+∞`.
pub fn eigen_residual(a: &MinPlusMatrix, lambda: f64, x: &[ExtendedReal]) -> Result<f64, TropicalError> {
    let ax = a.apply(x)?;
    Ok(ax
        .iter()
        .zip(x)
        .map(|(l, r)| match (l.finite(), r.finite()) {
            (Some(l), Some(r)) => (l - lambda - r).abs(),
            _ if l == r => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max))
}

/// Eigenvalue, witness cycle and eigenvector in one call.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub cycle: super::CycleStats,
    pub vector: MinPlusVector,
}

pub fn eigen_pair(a: &MinPlusMatrix) -> Result<EigenPair, TropicalError> {
    let cycle = min_mean_cycle(a)?;
    let vector = eigenvector(a, cycle.mean_weight)?;
    Ok(EigenPair {
        lambda: cycle.mean_weight,
        cycle,
        vector,
    })
}
