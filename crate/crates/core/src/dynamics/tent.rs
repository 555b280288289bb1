//! The two-state system `x1' = x2`, `x2' = min(3x2 − 2x1, 2 + 2x1 − x2)`,
//! whose reduced map is the tent `g(y) = min(2y, 2 − 2y)` with `λ(y) = y`.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fixed_point::{fixed_point_solve, reduce_pa, FixedPointReport, PaExpr, PaMap, Strategy};
use super::trajectory::kolmogorov_uniform;

pub fn tent_system() -> PaMap {
    PaMap::new(vec![
        PaExpr::var(2, 1, 0.0),
        PaExpr::min2(PaExpr::affine(vec![-2.0, 3.0], 0.0), PaExpr::affine(vec![2.0, -1.0], 2.0)),
    ])
}

pub fn tent_g(y: f64) -> f64 {
    (2.0 * y).min(2.0 - 2.0 * y)
}

/// Fixed points of the reduced tent map by region enumeration.
pub fn tent_fixed_points() -> FixedPointReport {
    fixed_point_solve(&reduce_pa(&tent_system()).g, Strategy::default())
}

fn g_exact(y: Rational64) -> Rational64 {
    let two = Rational64::from_integer(2);
    (two * y).min(two - two * y)
}

/// Exact orbit of `y0` split into its transient and its cycle; `None` if no
/// repeat shows up within `max_steps`.
pub fn tent_orbit_exact(y0: Rational64, max_steps: usize) -> Option<(Vec<Rational64>, Vec<Rational64>)> {
    let mut orbit = vec![y0];
    for _ in 0..max_steps {
        let y = g_exact(*orbit.last().expect("non-empty"));
        if let Some(start) = orbit.iter().position(|&z| z == y) {
            let cycle = orbit.split_off(start);
            return Some((orbit, cycle));
        }
        orbit.push(y);
    }
    None
}

/// Growth rate of the lift from `(0, y0)`, computed with exact rationals over
/// one period of the eventual cycle.
pub fn tent_growth_rate_exact(y0: Rational64, max_steps: usize) -> Option<Rational64> {
    let (transient, cycle) = tent_orbit_exact(y0, max_steps)?;
    let zero = Rational64::from_integer(0);
    let (two, three) = (Rational64::from_integer(2), Rational64::from_integer(3));
    let step = |(x1, x2): (Rational64, Rational64)| (x2, (three * x2 - two * x1).min(two + two * x1 - x2));
    let mut x = (zero, y0);
    for _ in 0..transient.len() {
        x = step(x);
    }
    let start = x.0;
    for _ in 0..cycle.len() {
        x = step(x);
    }
    Some((x.0 - start) / Rational64::from_integer(cycle.len() as i64))
}

/// The lift on the lattice `ℤ/q`: states are integers scaled by `q`, so the
/// arithmetic is exact and the trajectory does not collapse to 0 the way the
/// floating-point one does.
#[derive(Debug, Clone, Copy)]
pub struct TentLiftInt {
    pub q: i64,
}

impl TentLiftInt {
    pub fn step(&self, [x1, x2]: [i64; 2]) -> [i64; 2] {
        [x2, (3 * x2 - 2 * x1).min(2 * self.q + 2 * x1 - x2)]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TentMonteCarlo {
    pub seed: u64,
    pub denominator: i64,
    pub y0: f64,
    pub steps: usize,
    /// `(x1^K − x1^0) / K`.
    pub chi: f64,
    /// Normalized states `y^0..y^{K−1}`.
    pub samples: Vec<f64>,
    pub kolmogorov: f64,
}

/// Growth rate from a uniformly drawn start `y0 = p/q`, `p ∈ {0..q−1}`.
pub fn tent_monte_carlo(seed: u64, steps: usize, q: i64) -> TentMonteCarlo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(0..q);
    let lift = TentLiftInt { q };
    let mut x = [0i64, p];
    let mut samples = Vec::with_capacity(steps);
    for _ in 0..steps {
        samples.push((x[1] - x[0]) as f64 / q as f64);
        x = lift.step(x);
    }
    let chi = x[0] as f64 / (q as f64 * steps as f64);
    let kolmogorov = kolmogorov_uniform(&samples);
    TentMonteCarlo {
        seed,
        denominator: q,
        y0: p as f64 / q as f64,
        steps,
        chi,
        samples,
        kolmogorov,
    }
}
