//! Closed-form eigenvalues and eigenvectors of the junction dynamics, and the
//! residual check against the eigen-equations `λ + q = f(q)`.

use serde::{Deserialize, Serialize};

use super::{JunctionConfig, TrafficError};
use crate::dynamics::{PaExpr, PaMap};

/// Tolerance of the eigen-equation residual check.
pub const VERIFY_TOL: f64 = 1e-9;
/// Slack when testing whether `d` lies in a closed phase interval.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Free,
    Saturation,
    Recession,
    Freeze,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::Free, Phase::Saturation, Phase::Recession, Phase::Freeze];

    pub fn label(self) -> &'static str {
        match self {
            Phase::Free => "free",
            Phase::Saturation => "saturation",
            Phase::Recession => "recession",
            Phase::Freeze => "freeze",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseBoundaries {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PhaseBoundaries {
    pub fn new(n: usize, m: usize) -> Self {
        let big = (n + m) as f64;
        let rho = 1.0 / big;
        let r = m as f64 / big;
        Self {
            n,
            m,
            rho,
            r,
            alpha: 1.0 / (4.0 * (1.0 - rho)),
            beta: (r + 0.5 - rho) / (2.0 * (1.0 - rho)),
            gamma: r / (1.0 - rho),
        }
    }

    /// The recession band degenerates when `β = γ`, i.e. `m − n + 2 = 0`.
    pub fn has_recession(&self) -> bool {
        self.m + 2 != self.n
    }

    /// Phases whose closed interval contains `d`.
    pub fn candidates(&self, d: f64) -> Vec<Phase> {
        let inside = |lo: f64, hi: f64| d >= lo - BOUNDARY_TOL && d <= hi + BOUNDARY_TOL;
        let mut out = Vec::new();
        if inside(0.0, self.alpha) {
            out.push(Phase::Free);
        }
        if inside(self.alpha, self.beta) {
            out.push(Phase::Saturation);
        }
        if self.has_recession() && inside(self.beta.min(self.gamma), self.beta.max(self.gamma)) {
            out.push(Phase::Recession);
        }
        if inside(self.gamma, 1.0) {
            out.push(Phase::Freeze);
        }
        out
    }

    /// `λ` of a phase as a function of `d`.
    pub fn lambda(&self, phase: Phase, d: f64) -> f64 {
        let big = (self.n + self.m) as f64;
        match phase {
            Phase::Free => (1.0 - self.rho) * d,
            Phase::Saturation => 0.25,
            Phase::Recession => (self.m as f64 - (big - 1.0) * d) / (self.m as f64 - self.n as f64 + 2.0),
            Phase::Freeze => 0.0,
        }
    }

    /// The other recession expression, `((N−1)d − m + 1)/(n − m + 2)`.
    pub fn lambda_recession_alt(&self, d: f64) -> f64 {
        let big = (self.n + self.m) as f64;
        ((big - 1.0) * d - self.m as f64 + 1.0) / (self.n as f64 - self.m as f64 + 2.0)
    }
}

/// `max{min{d, 1/4, (r − d)/(2r − 1)}, 0}`.
pub fn junction_lambda_approx(d: f64, r: f64) -> f64 {
    d.min(0.25).min((r - d) / (2.0 * r - 1.0)).max(0.0)
}

/// `(U, V, X, Y) = (q_n, q_{n+m}, q_1, q_{n+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduced {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
}

/// Reduced eigenvector of a phase with `X = 0`.
pub fn junction_eigvec_table(cfg: &JunctionConfig, phase: Phase, lambda: f64) -> Reduced {
    let (n, g) = (cfg.n as f64, cfg.b_n());
    let (k, l) = (cfg.ai(cfg.n), cfg.ai(cfg.big_n()));
    let k_bar = 1.0 - k - l;
    let h_bar = cfg.b_m_bar();
    match phase {
        Phase::Freeze => Reduced {
            u: k_bar + h_bar,
            v: -2.0 * k - k_bar - h_bar,
            x: 0.0,
            y: -2.0 * k - k_bar,
        },
        _ => Reduced {
            u: g - (n - 1.0) * lambda,
            v: (n + 1.0) * lambda - 2.0 * k - g,
            x: 0.0,
            y: if phase == Phase::Recession {
                4.0 * lambda - 1.0 + l - k
            } else {
                l - k
            },
        },
    }
}

/// Fills the interior cells of both roads from the reduced vector.
pub fn expand_eigenvector(cfg: &JunctionConfig, red: Reduced, lambda: f64) -> Result<Vec<f64>, TrafficError> {
    if lambda >= 0.5 {
        return Err(TrafficError::LambdaTooLarge(lambda));
    }
    let (n, big) = (cfg.n, cfg.big_n());
    let mut q = vec![0.0; big];
    q[n - 1] = red.u;
    q[big - 1] = red.v;
    q[0] = red.x;
    q[n] = red.y;
    let fill = |q: &mut Vec<f64>, first: usize, last: usize, start: f64, end: f64| {
        // cells first+1 ..= last−1 between the anchors `first` and `last`
        for i in first + 1..last {
            let forward: f64 = start + (first..i).map(|j| cfg.ai(j) - lambda).sum::<f64>();
            let backward: f64 = end + (i..last).map(|j| 1.0 - cfg.ai(j) - lambda).sum::<f64>();
            q[i - 1] = forward.min(backward);
        }
    };
    fill(&mut q, 1, n, red.x, red.u);
    fill(&mut q, n + 1, big, red.y, red.v);
    Ok(q)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub lambda: f64,
    /// `λ + q_i − f_i(q)` per cell (1-based index `i` at position `i−1`).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Cell (1-based) with the largest residual.
    pub worst_cell: usize,
    pub lambda_ok: bool,
    pub pass: bool,
}

/// Residuals of the five equation groups of the eigenproblem.
pub fn verify_eigenpair(cfg: &JunctionConfig, lambda: f64, q: &[f64]) -> VerifyReport {
    let (n, big) = (cfg.n, cfg.big_n());
    let qi = |i: usize| q[i - 1];
    let rhs = |i: usize| -> f64 {
        if i == n {
            (cfg.abar(n) + qi(1) + qi(n + 1) - qi(big)).min(cfg.ai(n - 1) + qi(n - 1))
        } else if i == big {
            (cfg.abar(big) + qi(1) + qi(n + 1) - lambda - qi(n)).min(cfg.ai(big - 1) + qi(big - 1))
        } else if i == 1 || i == n + 1 {
            let mass = if i == 1 { cfg.ai(n) } else { cfg.ai(big) };
            (mass + (qi(n) + qi(big)) / 2.0).min(cfg.abar(i) + qi(i + 1))
        } else {
            (cfg.ai(i - 1) + qi(i - 1)).min(cfg.abar(i) + qi(i + 1))
        }
    };
    let residuals: Vec<f64> = (1..=big).map(|i| lambda + qi(i) - rhs(i)).collect();
    let (worst, max_residual) = residuals
        .iter()
        .enumerate()
        .map(|(i, r)| (i + 1, if r.is_nan() { f64::INFINITY } else { r.abs() }))
        .fold((1, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let lambda_ok = lambda <= 0.25 + BOUNDARY_TOL;
    VerifyReport {
        lambda,
        residuals,
        max_residual,
        worst_cell: worst,
        lambda_ok,
        pass: max_residual < VERIFY_TOL && lambda_ok,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenPairJunction {
    pub phase: Phase,
    pub lambda: f64,
    pub reduced: Reduced,
    pub q: Vec<f64>,
    pub report: VerifyReport,
}

/// Table pair for one phase at `λ`, expanded and verified.
pub fn table_pair(cfg: &JunctionConfig, phase: Phase, lambda: f64) -> Result<EigenPairJunction, TrafficError> {
    let reduced = junction_eigvec_table(cfg, phase, lambda);
    let q = expand_eigenvector(cfg, reduced, lambda)?;
    let report = verify_eigenpair(cfg, lambda, &q);
    Ok(EigenPairJunction {
        phase,
        lambda,
        reduced,
        q,
        report,
    })
}

/// Both recession expressions and their verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct RecessionCheck {
    pub table_lambda: f64,
    pub table_residual: f64,
    pub table_pass: bool,
    pub alt_lambda: f64,
    pub alt_residual: f64,
    pub alt_pass: bool,
}

pub fn recession_check(cfg: &JunctionConfig) -> RecessionCheck {
    let b = PhaseBoundaries::new(cfg.n, cfg.m);
    let d = cfg.density();
    let run = |lambda: f64| -> (f64, bool) {
        if !lambda.is_finite() {
            return (f64::INFINITY, false);
        }
        match table_pair(cfg, Phase::Recession, lambda) {
            Ok(p) => (p.report.max_residual, p.report.pass),
            Err(_) => (f64::INFINITY, false),
        }
    };
    let table_lambda = b.lambda(Phase::Recession, d);
    let alt_lambda = b.lambda_recession_alt(d);
    let (table_residual, table_pass) = run(table_lambda);
    let (alt_residual, alt_pass) = run(alt_lambda);
    RecessionCheck {
        table_lambda,
        table_residual,
        table_pass,
        alt_lambda,
        alt_residual,
        alt_pass,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaExact {
    /// The largest valid candidate.
    pub primary: f64,
    pub phase: Phase,
    /// Every phase whose interval contains `d`, with its `λ`.
    pub candidates: Vec<(Phase, f64)>,
    pub recession: Option<RecessionCheck>,
}

/// `λ` from the density, the recession expression chosen by the residual
/// check on this marking.
pub fn junction_lambda_exact(cfg: &JunctionConfig) -> Result<LambdaExact, TrafficError> {
    let d = cfg.density();
    if !(-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&d) {
        return Err(TrafficError::DensityOutOfRange(d));
    }
    let b = PhaseBoundaries::new(cfg.n, cfg.m);
    let mut recession = None;
    let candidates: Vec<(Phase, f64)> = b
        .candidates(d)
        .into_iter()
        .map(|ph| {
            if ph != Phase::Recession {
                return (ph, b.lambda(ph, d));
            }
            let chk = recession_check(cfg);
            let lam = if chk.table_pass || !chk.alt_pass {
                chk.table_lambda
            } else {
                chk.alt_lambda
            };
            log::debug!(
                "recession at d={d}: table λ={} ({}), alternative λ={} ({})",
                chk.table_lambda,
                if chk.table_pass { "pass" } else { "fail" },
                chk.alt_lambda,
                if chk.alt_pass { "pass" } else { "fail" },
            );
            recession = Some(chk);
            (ph, lam)
        })
        .collect();
    let &(phase, primary) = candidates
        .iter()
        .fold(None, |best: Option<&(Phase, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
        .ok_or(TrafficError::DensityOutOfRange(d))?;
    Ok(LambdaExact {
        primary,
        phase,
        candidates,
        recession,
    })
}

/// Expanded, verified table pairs for every candidate phase of `cfg`.
pub fn junction_eigenpairs(cfg: &JunctionConfig) -> Result<Vec<EigenPairJunction>, TrafficError> {
    let lam = junction_lambda_exact(cfg)?;
    lam.candidates
        .iter()
        .map(|&(ph, l)| table_pair(cfg, ph, l))
        .collect()
}

/// The eigenproblem restricted to `z = (λ, U, V, Y)` with `X = 0`, the interior
/// cells eliminated through their path expressions. Fixed points of this map
/// are eigenpairs whenever `λ < 1/2`.
pub fn junction_reduced_map(cfg: &JunctionConfig) -> PaMap {
    let (n, big) = (cfg.n, cfg.big_n());
    const L: usize = 0;
    const U: usize = 1;
    const V: usize = 2;
    const Y: usize = 3;
    let sp = |terms: &[(usize, f64)], c: f64| PaExpr::sparse(4, terms, c);
    // interior cell i between anchor `start` (cell `first`) and `end` (cell `last`)
    let interior = |i: usize, first: usize, last: usize, start: Option<usize>, end: usize| -> PaExpr {
        let steps_f = (i - first) as f64;
        let mass_f: f64 = (first..i).map(|j| cfg.ai(j)).sum();
        let mut fw = vec![(L, -steps_f)];
        if let Some(s) = start {
            fw.push((s, 1.0));
        }
        let steps_b = (last - i) as f64;
        let mass_b: f64 = (i..last).map(|j| 1.0 - cfg.ai(j)).sum();
        PaExpr::min2(sp(&fw, mass_f), sp(&[(L, -steps_b), (end, 1.0)], mass_b))
    };
    // q_2, q_{n−1}, q_{n+2}, q_{n+m−1}, with anchors where the road is short
    let q2 = if n > 2 { interior(2, 1, n, None, U) } else { sp(&[(U, 1.0)], 0.0) };
    let qn1 = if n > 2 { interior(n - 1, 1, n, None, U) } else { sp(&[], 0.0) };
    let qn2 = if big > n + 2 { interior(n + 2, n + 1, big, Some(Y), V) } else { sp(&[(V, 1.0)], 0.0) };
    let qb1 = if big > n + 2 { interior(big - 1, n + 1, big, Some(Y), V) } else { sp(&[(Y, 1.0)], 0.0) };
    let shifted = |e: PaExpr, c: f64| PaExpr::Lin {
        terms: vec![(1.0, e)],
        c,
    };
    let minus_lambda = |e: PaExpr| PaExpr::Lin {
        terms: vec![(1.0, e), (-1.0, sp(&[(L, 1.0)], 0.0))],
        c: 0.0,
    };
    let lambda = PaExpr::min2(sp(&[(U, 0.5), (V, 0.5)], cfg.ai(n)), shifted(q2, cfg.abar(1)));
    let u = minus_lambda(PaExpr::min2(
        sp(&[(Y, 1.0), (V, -1.0)], cfg.abar(n)),
        shifted(qn1, cfg.ai(n - 1)),
    ));
    let v = minus_lambda(PaExpr::min2(
        sp(&[(Y, 1.0), (L, -1.0), (U, -1.0)], cfg.abar(big)),
        shifted(qb1, cfg.ai(big - 1)),
    ));
    let y = minus_lambda(PaExpr::min2(
        sp(&[(U, 0.5), (V, 0.5)], cfg.ai(big)),
        shifted(qn2, cfg.abar(n + 1)),
    ));
    PaMap::new(vec![lambda, u, v, y])
}
