//! Fundamental diagram: closed-form `λ(d)` against simulated growth rates.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{junction_lambda_approx, junction_lambda_exact, Phase};
use super::junction::{marking_from_density, JunctionDynamics, Placement};
use crate::dynamics::growth_rate;

pub const CSV_HEADER: &str = "d,lambda_exact,lambda_approx,chi_sim,phase,n,m,seed,K0,K";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub k0: usize,
    pub k: usize,
    pub seed: u64,
    pub placement: Placement,
}

impl SimParams {
    /// `K0 = 200·N`, `K = 2000·N`, even placement.
    pub fn defaults(n: usize, m: usize) -> Self {
        let big = n + m;
        Self {
            k0: 200 * big,
            k: 2000 * big,
            seed: 0,
            placement: Placement::Even,
        }
    }
}

/// `points` evenly spaced densities on `[0, 1]`.
pub fn density_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        p => (0..p).map(|i| i as f64 / (p - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramPoint {
    pub d: f64,
    pub lambda_exact: f64,
    pub phase: Phase,
    /// Further valid `(phase, λ)` where the table is multi-valued at `d`.
    pub alternatives: Vec<(Phase, f64)>,
    pub lambda_approx: f64,
    pub chi_sim: Option<f64>,
    pub chi_spread: Option<f64>,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub k0: usize,
    pub k: usize,
    pub error: Option<String>,
}

fn point_seed(base: u64, idx: usize) -> u64 {
    base.wrapping_add(idx as u64)
}

pub fn diagram_point(n: usize, m: usize, d: f64, params: SimParams, seed: u64) -> DiagramPoint {
    let r = m as f64 / (n + m) as f64;
    let mut point = DiagramPoint {
        d,
        lambda_exact: f64::NAN,
        phase: Phase::Free,
        alternatives: Vec::new(),
        lambda_approx: junction_lambda_approx(d, r),
        chi_sim: None,
        chi_spread: None,
        n,
        m,
        seed,
        k0: params.k0,
        k: params.k,
        error: None,
    };
    let cfg = match marking_from_density(n, m, d, params.placement, seed) {
        Ok(c) => c,
        Err(e) => {
            point.error = Some(e.to_string());
            return point;
        }
    };
    match junction_lambda_exact(&cfg) {
        Ok(l) => {
            point.lambda_exact = l.primary;
            point.phase = l.phase;
            let mut primary_seen = false;
            point.alternatives = l
                .candidates
                .into_iter()
                .filter(|&(ph, lam)| {
                    let is_primary = !primary_seen && ph == l.phase && lam == l.primary;
                    primary_seen |= is_primary;
                    !is_primary
                })
                .collect();
        }
        Err(e) => point.error = Some(e.to_string()),
    }
    let f = JunctionDynamics::new(cfg);
    match growth_rate(&f, &vec![0.0; n + m], params.k0, params.k) {
        Ok(g) => {
            point.chi_sim = Some(g.chi);
            point.chi_spread = Some(g.spread);
        }
        Err(e) => point.error = Some(e.to_string()),
    }
    point
}

/// One point per density, computed in parallel and returned sorted by `d`.
pub fn diagram_sweep(n: usize, m: usize, grid: &[f64], params: SimParams) -> Vec<DiagramPoint> {
    let mut points: Vec<DiagramPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &d)| diagram_point(n, m, d, params, point_seed(params.seed, i)))
        .collect();
    points.sort_by(|a, b| a.d.total_cmp(&b.d));
    points
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

/// CSV rows; alternative eigenvalues get extra rows whose phase is prefixed
/// with `alt:`.
pub fn to_csv(points: &[DiagramPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        let chi = p.chi_sim.map(fmt_num).unwrap_or_default();
        let row = |lam: f64, phase: String| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt_num(p.d),
                fmt_num(lam),
                fmt_num(p.lambda_approx),
                chi,
                phase,
                p.n,
                p.m,
                p.seed,
                p.k0,
                p.k
            )
        };
        out.push_str(&row(p.lambda_exact, p.phase.to_string()));
        for &(ph, lam) in &p.alternatives {
            out.push_str(&row(lam, format!("alt:{ph}")));
        }
    }
    out
}

/// Line plot of `λ_exact`, `λ_approx` and `χ_sim` against `d`.
pub fn to_svg(points: &[DiagramPoint]) -> String {
    let (w, h, pad) = (640.0, 400.0, 48.0);
    let y_max = 0.3;
    let sx = |d: f64| pad + d * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - v / y_max * (h - 2.0 * pad);
    let line = |vals: Vec<(f64, f64)>, color: &str, dash: &str| {
        let pts: Vec<String> = vals
            .into_iter()
            .filter(|(_, v)| v.is_finite())
            .map(|(d, v)| format!("{:.2},{:.2}", sx(d), sy(v)))
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" stroke-dasharray=\"{dash}\" points=\"{}\"/>\n",
            pts.join(" ")
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<line x1=\"{pad}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>",
        h - pad,
        w - pad
    );
    let _ = writeln!(s, "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>", h - pad);
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{t}</text>",
            sx(t),
            h - pad + 16.0
        );
    }
    for t in [0.0, 0.1, 0.2, 0.25] {
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{t}</text>",
            pad - 6.0,
            sy(t) + 4.0
        );
    }
    s.push_str(&line(points.iter().map(|p| (p.d, p.lambda_exact)).collect(), "black", "none"));
    s.push_str(&line(points.iter().map(|p| (p.d, p.lambda_approx)).collect(), "gray", "6 4"));
    s.push_str(&line(
        points.iter().map(|p| (p.d, p.chi_sim.unwrap_or(f64::NAN))).collect(),
        "crimson",
        "2 3",
    ));
    let legend = [("black", "lambda exact"), ("gray", "lambda approx"), ("crimson", "chi simulated")];
    for (i, (c, label)) in legend.iter().enumerate() {
        let y = pad + 14.0 * i as f64;
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"11\" fill=\"{c}\" text-anchor=\"end\">{label}</text>",
            w - pad
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">d</text>",
        w / 2.0,
        h - 10.0
    );
    s.push_str("</svg>\n");
    s
}
