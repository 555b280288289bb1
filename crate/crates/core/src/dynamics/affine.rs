use nalgebra::DMatrix;
use serde::Serialize;

use super::DynamicsError;

const KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct AffineEigen {
    pub lambda: f64,
    /// Left eigenvector of `A` for 1, normalized to sum 1.
    pub p: Vec<f64>,
}

/// Eigenvalue of `x ↦ A x + b` for a standard matrix with unit row sums:
/// `λ = p·b` with `pA = p`, `p·1 = 1`.
pub fn eigen_affine_standard(a: &[Vec<f64>], b: &[f64]) -> Result<AffineEigen, DynamicsError> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(DynamicsError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    // kernel of (A − I)^T
    let m = DMatrix::from_fn(n, n, |i, j| a[j][i] - if i == j { 1.0 } else { 0.0 });
    let scale = m.amax().max(1.0);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let null: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= KERNEL_TOL * scale)
        .map(|(i, _)| i)
        .collect();
    if null.len() != 1 {
        return Err(DynamicsError::KernelDimension(null.len()));
    }
    let row = v_t.row(null[0]);
    let sum: f64 = row.iter().sum();
    if sum.abs() < KERNEL_TOL {
        return Err(DynamicsError::KernelDimension(1));
    }
    let p: Vec<f64> = row.iter().map(|v| v / sum).collect();
    let lambda = p.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(AffineEigen { lambda, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaging_matrix() {
        let e = eigen_affine_standard(&[vec![0.5, 0.5], vec![0.5, 0.5]], &[1.0, 3.0]).unwrap();
        assert!((e.lambda - 2.0).abs() < 1e-12);
        assert!((e.p[0] - 0.5).abs() < 1e-12 && (e.p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_cases() {
        let e = eigen_affine_standard(&[vec![1.0]], &[0.3]).unwrap();
        assert!((e.lambda - 0.3).abs() < 1e-12);
        let err = eigen_affine_standard(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 2.0]).unwrap_err();
        assert_eq!(err, DynamicsError::KernelDimension(2));
    }

    #[test]
    fn stochastic_three_state() {
        let a = vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0]];
        // stationary law (1/4, 1/2, 1/4)
        let e = eigen_affine_standard(&a, &[4.0, 0.0, 8.0]).unwrap();
        assert!((e.lambda - 3.0).abs() < 1e-12);
    }
}
