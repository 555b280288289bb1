//! Piecewise-affine maps, the reduction of the eigenproblem `f(x) = λ + x` to
//! a fixed point `y = g(y)`, and fixed-point solvers.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::HomogeneousMap;

/// Piecewise-affine expression in `n` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PaExpr {
    Affine { coef: Vec<f64>, c: f64 },
    Min(Vec<PaExpr>),
    Max(Vec<PaExpr>),
    /// `Σ w_i e_i + c`.
    Lin { terms: Vec<(f64, PaExpr)>, c: f64 },
}

impl PaExpr {
    pub fn affine(coef: Vec<f64>, c: f64) -> Self {
        PaExpr::Affine { coef, c }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        PaExpr::affine(vec![0.0; n], c)
    }

    /// `x_i + c`.
    pub fn var(n: usize, i: usize, c: f64) -> Self {
        let mut coef = vec![0.0; n];
        coef[i] = 1.0;
        PaExpr::affine(coef, c)
    }

    /// `Σ w_i x_i + c` from sparse terms.
    pub fn sparse(n: usize, terms: &[(usize, f64)], c: f64) -> Self {
        let mut coef = vec![0.0; n];
        for &(i, w) in terms {
            coef[i] += w;
        }
        PaExpr::affine(coef, c)
    }

    pub fn min2(a: PaExpr, b: PaExpr) -> Self {
        PaExpr::Min(vec![a, b])
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            PaExpr::Affine { coef, c } => coef.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + c,
            PaExpr::Min(es) => es.iter().map(|e| e.eval(x)).fold(f64::INFINITY, f64::min),
            PaExpr::Max(es) => es.iter().map(|e| e.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            PaExpr::Lin { terms, c } => terms.iter().map(|(w, e)| w * e.eval(x)).sum::<f64>() + c,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            PaExpr::Affine { coef, .. } => coef.len(),
            PaExpr::Min(es) | PaExpr::Max(es) => es.first().map_or(0, PaExpr::arity),
            PaExpr::Lin { terms, .. } => terms.first().map_or(0, |(_, e)| e.arity()),
        }
    }

    /// Number of affine pieces obtained by choosing one branch at every
    /// `Min`/`Max` node.
    pub fn selections(&self) -> usize {
        match self {
            PaExpr::Affine { .. } => 1,
            PaExpr::Min(es) | PaExpr::Max(es) => es.iter().map(PaExpr::selections).sum(),
            PaExpr::Lin { terms, .. } => terms.iter().map(|(_, e)| e.selections()).product(),
        }
    }

    /// The affine piece with index `sel < selections()`.
    pub fn piece(&self, sel: usize) -> (Vec<f64>, f64) {
        match self {
            PaExpr::Affine { coef, c } => (coef.clone(), *c),
            PaExpr::Min(es) | PaExpr::Max(es) => {
                let mut s = sel;
                for e in es {
                    let k = e.selections();
                    if s < k {
                        return e.piece(s);
                    }
                    s -= k;
                }
                panic!("selection {sel} out of range")
            }
            PaExpr::Lin { terms, c } => {
                let mut coef = vec![0.0; self.arity()];
                let mut cst = *c;
                let mut s = sel;
                for (w, e) in terms {
                    let k = e.selections();
                    let (ce, ke) = e.piece(s % k);
                    s /= k;
                    for (a, b) in coef.iter_mut().zip(&ce) {
                        *a += w * b;
                    }
                    cst += w * ke;
                }
                (coef, cst)
            }
        }
    }

    /// Indices of the pieces attaining the value at `x` (all of them on ties).
    pub fn active(&self, x: &[f64], tol: f64) -> Vec<usize> {
        match self {
            PaExpr::Affine { .. } => vec![0],
            PaExpr::Min(es) | PaExpr::Max(es) => {
                let v = self.eval(x);
                let mut out = Vec::new();
                let mut offset = 0;
                for e in es {
                    if (e.eval(x) - v).abs() <= tol {
                        out.extend(e.active(x, tol).into_iter().map(|s| s + offset));
                    }
                    offset += e.selections();
                }
                out
            }
            PaExpr::Lin { terms, .. } => {
                let mut out = vec![0usize];
                let mut radix = 1;
                for (_, e) in terms {
                    let act = e.active(x, tol);
                    out = out.iter().flat_map(|&o| act.iter().map(move |&a| o + a * radix)).collect();
                    radix *= e.selections();
                }
                out
            }
        }
    }

    /// Substitutes `x_0 = 0` and drops the first variable.
    pub fn drop_first(&self) -> Self {
        match self {
            PaExpr::Affine { coef, c } => PaExpr::Affine {
                coef: coef[1..].to_vec(),
                c: *c,
            },
            PaExpr::Min(es) => PaExpr::Min(es.iter().map(PaExpr::drop_first).collect()),
            PaExpr::Max(es) => PaExpr::Max(es.iter().map(PaExpr::drop_first).collect()),
            PaExpr::Lin { terms, c } => PaExpr::Lin {
                terms: terms.iter().map(|(w, e)| (*w, e.drop_first())).collect(),
                c: *c,
            },
        }
    }
}

/// A vector of piecewise-affine expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaMap {
    pub exprs: Vec<PaExpr>,
}

impl PaMap {
    pub fn new(exprs: Vec<PaExpr>) -> Self {
        Self { exprs }
    }

    pub fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        self.exprs.iter().map(|e| e.eval(x)).collect()
    }

    pub fn regions(&self) -> Option<usize> {
        self.exprs
            .iter()
            .try_fold(1usize, |acc, e| acc.checked_mul(e.selections()))
    }
}

impl HomogeneousMap for PaMap {
    fn dim(&self) -> usize {
        self.exprs.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            *o = e.eval(x);
        }
    }
}

/// `g_{i−1}(y) = f_i(0, y) − f_1(0, y)` and `λ(y) = f_1(0, y)`.
#[derive(Debug, Clone)]
pub struct ReducedPa {
    pub g: PaMap,
    pub lambda: PaExpr,
}

impl ReducedPa {
    /// `(λ(y), (0, y))`.
    pub fn eigenpair(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let mut x = vec![0.0];
        x.extend_from_slice(y);
        (self.lambda.eval(y), x)
    }
}

pub fn reduce_pa(f: &PaMap) -> ReducedPa {
    let lambda = f.exprs[0].drop_first();
    let g = f.exprs[1..]
        .iter()
        .map(|e| PaExpr::Lin {
            terms: vec![(1.0, e.drop_first()), (-1.0, lambda.clone())],
            c: 0.0,
        })
        .collect();
    ReducedPa {
        g: PaMap::new(g),
        lambda,
    }
}

/// The same reduction for an arbitrary map, evaluated numerically.
pub struct ReducedMap<'a> {
    f: &'a dyn HomogeneousMap,
}

pub fn reduce_eigenproblem(f: &dyn HomogeneousMap) -> ReducedMap<'_> {
    ReducedMap { f }
}

impl ReducedMap<'_> {
    pub fn dim(&self) -> usize {
        self.f.dim() - 1
    }

    fn lifted(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0];
        x.extend_from_slice(y);
        self.f.eval(&x)
    }

    pub fn g(&self, y: &[f64]) -> Vec<f64> {
        let fx = self.lifted(y);
        fx[1..].iter().map(|v| v - fx[0]).collect()
    }

    pub fn lambda(&self, y: &[f64]) -> f64 {
        self.lifted(y)[0]
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub enum Strategy {
    /// Affine-region enumeration, falling back to iteration above `max_dim`.
    Enumerate { max_dim: usize, max_regions: usize },
    /// `y ← (1 − θ) y + θ g(y)` from `y0 = 0`.
    Iterate { theta: f64, max_iter: usize },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Enumerate {
            max_dim: 4,
            max_regions: 1 << 20,
        }
    }
}

pub const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct FixedPoint {
    pub y: Vec<f64>,
    /// `‖g(y) − y‖_∞`.
    pub residual: f64,
    /// Spectral radius of the slope matrix in each region touching `y`.
    pub slope_radii: Vec<f64>,
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    pub points: Vec<FixedPoint>,
    /// Whether every region was examined.
    pub complete: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum IterationOutcome {
    Converged { y: Vec<f64>, iterations: usize },
    Cycle { period: usize, y: Vec<f64> },
    NotConverged { y: Vec<f64>, residual: f64 },
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Damped iteration with exact-repeat cycle detection.
pub fn damped_iteration(g: impl Fn(&[f64]) -> Vec<f64>, y0: &[f64], theta: f64, max_iter: usize, tol: f64) -> IterationOutcome {
    let mut y = y0.to_vec();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for it in 0..max_iter {
        let gy = g(&y);
        if sup_dist(&gy, &y) < tol {
            return IterationOutcome::Converged { y, iterations: it };
        }
        let key: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
        if let Some(prev) = seen.insert(key, it) {
            return IterationOutcome::Cycle { period: it - prev, y };
        }
        y = y.iter().zip(&gy).map(|(a, b)| (1.0 - theta) * a + theta * b).collect();
    }
    let residual = sup_dist(&g(&y), &y);
    IterationOutcome::NotConverged { y, residual }
}

fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn slope_matrix(g: &PaMap, sels: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let n = g.exprs.len();
    let mut m = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    for (i, (e, &s)) in g.exprs.iter().zip(sels).enumerate() {
        let (coef, k) = e.piece(s);
        for (j, a) in coef.iter().enumerate() {
            m[(i, j)] = *a;
        }
        c[i] = k;
    }
    (m, c)
}

fn classify(g: &PaMap, y: Vec<f64>) -> FixedPoint {
    let residual = sup_dist(&g.eval_vec(&y), &y);
    let actives: Vec<Vec<usize>> = g.exprs.iter().map(|e| e.active(&y, 1e-9)).collect();
    let mut radii = Vec::new();
    // cartesian product of touching regions, capped
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for act in &actives {
        combos = combos
            .iter()
            .flat_map(|c| {
                act.iter().map(move |&a| {
                    let mut c = c.clone();
                    c.push(a);
                    c
                })
            })
            .take(64)
            .collect();
    }
    for sels in &combos {
        radii.push(spectral_radius(&slope_matrix(g, sels).0));
    }
    let stable = radii.iter().all(|&r| r < 1.0);
    FixedPoint {
        y,
        residual,
        slope_radii: radii,
        stable,
    }
}

fn push_unique(points: &mut Vec<FixedPoint>, p: FixedPoint) {
    if !points.iter().any(|q| sup_dist(&q.y, &p.y) < 1e-9) {
        points.push(p);
    }
}

pub fn fixed_point_solve(g: &PaMap, strategy: Strategy) -> FixedPointReport {
    let n = g.exprs.len();
    let mut notes = Vec::new();
    match strategy {
        Strategy::Enumerate { max_dim, max_regions } => {
            match g.regions().filter(|&r| n <= max_dim && r <= max_regions) {
                Some(regions) => enumerate(g, regions),
                None => {
                    notes.push(format!(
                        "dimension {n} or region count {:?} above cap; iterating instead",
                        g.regions()
                    ));
                    let mut rep = fixed_point_solve(
                        g,
                        Strategy::Iterate {
                            theta: 0.5,
                            max_iter: 1_000_000,
                        },
                    );
                    rep.complete = false;
                    notes.append(&mut rep.notes);
                    rep.notes = notes;
                    rep
                }
            }
        }
        Strategy::Iterate { theta, max_iter } => {
            let outcome = damped_iteration(|y| g.eval_vec(y), &vec![0.0; n], theta, max_iter, 1e-12);
            let mut points = Vec::new();
            match outcome {
                IterationOutcome::Converged { y, iterations } => {
                    notes.push(format!("converged after {iterations} iterations"));
                    points.push(classify(g, y));
                }
                IterationOutcome::Cycle { period, .. } => notes.push(format!("iteration cycles with period {period}")),
                IterationOutcome::NotConverged { residual, .. } => notes.push(format!("no convergence, residual {residual:e}")),
            }
            points.retain(|p| p.residual < FIXED_POINT_TOL);
            FixedPointReport {
                points,
                complete: false,
                notes,
            }
        }
    }
}

fn enumerate(g: &PaMap, regions: usize) -> FixedPointReport {
    let n = g.exprs.len();
    let counts: Vec<usize> = g.exprs.iter().map(PaExpr::selections).collect();
    let mut points = Vec::new();
    let mut degenerate = 0usize;
    let id = DMatrix::<f64>::identity(n, n);
    for r in 0..regions {
        let mut rest = r;
        let sels: Vec<usize> = counts
            .iter()
            .map(|&k| {
                let s = rest % k;
                rest /= k;
                s
            })
            .collect();
        let (m, c) = slope_matrix(g, &sels);
        let a = &id - &m;
        let y = match a.clone().lu().solve(&c) {
            Some(y) if y.iter().all(|v| v.is_finite()) => y,
            _ => {
                degenerate += 1;
                match a.svd(true, true).solve(&c, 1e-12) {
                    Ok(y) => y,
                    Err(_) => continue,
                }
            }
        };
        let y: Vec<f64> = y.iter().copied().collect();
        if sup_dist(&g.eval_vec(&y), &y) < FIXED_POINT_TOL {
            push_unique(&mut points, classify(g, y));
        }
    }
    points.sort_by(|a, b| a.y.partial_cmp(&b.y).expect("finite fixed points"));
    let mut notes = vec![format!("{regions} regions examined")];
    if degenerate > 0 {
        notes.push(format!(
            "{degenerate} regions with singular I − M; one least-squares point kept per region when it is a fixed point"
        ));
    }
    FixedPointReport {
        points,
        complete: true,
        notes,
    }
}
