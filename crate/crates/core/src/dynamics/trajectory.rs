use serde::Serialize;

use super::{DynamicsError, HomogeneousMap};

#[derive(Debug, Clone, Copy)]
pub struct IterateOptions {
    /// Keep every `stride`-th state (the last one is always kept).
    pub stride: usize,
    /// Bound on `|y_j|` for the bounded flag.
    pub bound: f64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            bound: 1e6,
        }
    }
}

/// States `x^0..x^K` of `x^{k+1} = f(x^k)`, possibly strided.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub steps: Vec<usize>,
    pub states: Vec<Vec<f64>>,
    pub stride: usize,
    pub bound: f64,
    /// `max_k max_j |y^k_j| ≤ bound` over the recorded states.
    pub bounded: bool,
}

impl TrajectoryRecord {
    /// `y^k_{j−1} = x^k_j − x^k_1` for `j = 2..n`.
    pub fn normalized(&self, idx: usize) -> Vec<f64> {
        normalize(&self.states[idx])
    }

    pub fn normalized_all(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|x| normalize(x)).collect()
    }

    /// `h(y^k) = f_1(x^k) − x^k_1`; only available for unstrided records.
    pub fn increments(&self) -> Option<Vec<f64>> {
        (self.stride == 1).then(|| self.states.windows(2).map(|w| w[1][0] - w[0][0]).collect())
    }

    pub fn max_abs_y(&self) -> f64 {
        self.states
            .iter()
            .flat_map(|x| normalize(x))
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn normalize(x: &[f64]) -> Vec<f64> {
    x[1..].iter().map(|v| v - x[0]).collect()
}

fn check_finite(x: &[f64], step: usize) -> Result<(), DynamicsError> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(coord) => Err(DynamicsError::Divergence { step, coord }),
        None => Ok(()),
    }
}

/// Runs `K` steps from `x0`, calling `visit(k, x^k)` for `k = 0..=K`.
pub fn run(
    f: &dyn HomogeneousMap,
    x0: &[f64],
    k_max: usize,
    mut visit: impl FnMut(usize, &[f64]),
) -> Result<Vec<f64>, DynamicsError> {
    if x0.len() != f.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: f.dim(),
            found: x0.len(),
        });
    }
    check_finite(x0, 0)?;
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    visit(0, &x);
    for k in 1..=k_max {
        f.apply(&x, &mut next);
        check_finite(&next, k)?;
        std::mem::swap(&mut x, &mut next);
        visit(k, &x);
    }
    Ok(x)
}

pub fn iterate(
    f: &dyn HomogeneousMap,
    x0: &[f64],
    k_max: usize,
    opts: IterateOptions,
) -> Result<TrajectoryRecord, DynamicsError> {
    let stride = opts.stride.max(1);
    let mut steps = Vec::new();
    let mut states = Vec::new();
    run(f, x0, k_max, |k, x| {
        if k % stride == 0 || k == k_max {
            steps.push(k);
            states.push(x.to_vec());
        }
    })?;
    let mut rec = TrajectoryRecord {
        steps,
        states,
        stride,
        bound: opts.bound,
        bounded: true,
    };
    rec.bounded = rec.max_abs_y() <= opts.bound;
    Ok(rec)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRateEstimate {
    /// Coordinate 1's estimate.
    pub chi: f64,
    pub k0: usize,
    pub k: usize,
    pub per_coordinate: Vec<f64>,
    /// `max χ_i − min χ_i`.
    pub spread: f64,
}

impl GrowthRateEstimate {
    pub fn consistent(&self, tol: f64) -> bool {
        self.spread <= tol
    }
}

/// `χ_i = (x_i^K − x_i^{K0}) / (K − K0)`.
pub fn growth_rate(f: &dyn HomogeneousMap, x0: &[f64], k0: usize, k: usize) -> Result<GrowthRateEstimate, DynamicsError> {
    if k <= k0 {
        return Err(DynamicsError::BadHorizon { k0, k });
    }
    let mut at_k0 = Vec::new();
    let last = run(f, x0, k, |step, x| {
        if step == k0 {
            at_k0 = x.to_vec();
        }
    })?;
    Ok(estimate_from(&at_k0, &last, k0, k))
}

pub fn estimate_from(x_k0: &[f64], x_k: &[f64], k0: usize, k: usize) -> GrowthRateEstimate {
    let span = (k - k0) as f64;
    let per: Vec<f64> = x_k.iter().zip(x_k0).map(|(b, a)| (b - a) / span).collect();
    let hi = per.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = per.iter().cloned().fold(f64::INFINITY, f64::min);
    GrowthRateEstimate {
        chi: per[0],
        k0,
        k,
        spread: hi - lo,
        per_coordinate: per,
    }
}

/// Cesàro average of Dirac masses at `y^0..y^{N−1}`.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalMeasure {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Merges equal points, summing their weights; points come out sorted.
    pub fn atoms(&self, tol: f64) -> Vec<(Vec<f64>, f64)> {
        let mut pts: Vec<(Vec<f64>, f64)> = self.points.iter().cloned().zip(self.weights.iter().cloned()).collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite points"));
        let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
        for (p, w) in pts {
            match out.last_mut() {
                Some((q, acc)) if q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol) => *acc += w,
                _ => out.push((p, w)),
            }
        }
        out
    }
}

/// Requires a bounded, unstrided record with at least two states.
pub fn empirical_measure(traj: &TrajectoryRecord) -> Result<EmpiricalMeasure, DynamicsError> {
    if !traj.bounded {
        return Err(DynamicsError::Unbounded(traj.max_abs_y()));
    }
    if traj.stride != 1 || traj.states.len() < 2 {
        return Err(DynamicsError::Strided);
    }
    let n = traj.states.len() - 1;
    let points: Vec<Vec<f64>> = traj.states[..n].iter().map(|x| normalize(x)).collect();
    Ok(EmpiricalMeasure {
        weights: vec![1.0 / n as f64; n],
        points,
    })
}

pub fn measure_average(meas: &EmpiricalMeasure, h: impl Fn(&[f64]) -> f64) -> f64 {
    meas.points.iter().zip(&meas.weights).map(|(y, w)| w * h(y)).sum()
}

/// Kolmogorov distance between the empirical law of `samples` and
/// uniform[0, 1].
pub fn kolmogorov_uniform(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - x).abs().max((x - i as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}
