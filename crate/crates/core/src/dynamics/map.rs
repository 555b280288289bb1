use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hybrid::HybridMatrix;
use crate::petri::TransitionRecursion;
use crate::scalar::ExtendedReal;
use crate::tropical::MinPlusMatrix;

/// A map `ℝⁿ → ℝⁿ`, expected to satisfy `f(x + λ) = f(x) + λ`.
pub trait HomogeneousMap: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        out
    }
}

fn through_ext(x: &[f64], out: &mut [f64], f: impl FnOnce(&[ExtendedReal]) -> Vec<ExtendedReal>) {
    let xe: Vec<ExtendedReal> = x.iter().map(|&v| ExtendedReal::from(v)).collect();
    for (o, v) in out.iter_mut().zip(f(&xe)) {
        *o = v.to_f64();
    }
}

impl HomogeneousMap for HybridMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        through_ext(x, out, |xe| self.apply_values(xe));
    }
}

impl HomogeneousMap for MinPlusMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        through_ext(x, out, |xe| self.apply(xe).expect("square map"));
    }
}

impl HomogeneousMap for TransitionRecursion {
    fn dim(&self) -> usize {
        TransitionRecursion::dim(self)
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        through_ext(x, out, |xe| self.step_ext(xe));
    }
}

/// Uniform shift `x ↦ x + c`.
#[derive(Debug, Clone, Copy)]
pub struct Shift {
    pub dim: usize,
    pub c: f64,
}

impl HomogeneousMap for Shift {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = v + self.c;
        }
    }
}

/// A map given by a closure.
pub struct ClosureMap<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> ClosureMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> HomogeneousMap for ClosureMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityReport {
    pub probes: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `f(x + λ) = f(x) + λ` on `probes` random pairs with `x_i ∈ [−10, 10]`
/// and `λ ∈ [−5, 5]`.
pub fn probe_homogeneity(f: &dyn HomogeneousMap, probes: usize, seed: u64, tolerance: f64) -> HomogeneityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.dim();
    let mut max_error: f64 = 0.0;
    for _ in 0..probes {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let lambda: f64 = rng.gen_range(-5.0..5.0);
        let shifted: Vec<f64> = x.iter().map(|v| v + lambda).collect();
        let lhs = f.eval(&shifted);
        let rhs = f.eval(&x);
        for (l, r) in lhs.iter().zip(&rhs) {
            let err = if l.is_finite() && r.is_finite() {
                (l - r - lambda).abs()
            } else if l == r {
                0.0
            } else {
                f64::INFINITY
            };
            max_error = max_error.max(err);
        }
    }
    HomogeneityReport {
        probes,
        max_error,
        tolerance,
        passed: max_error <= tolerance,
    }
}
