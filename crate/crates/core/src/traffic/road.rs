//! Circular road: the exclusion process `10 → 01` and its event-graph form.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::Serialize;

use super::TrafficError;
use crate::scalar::Finite;
use crate::tropical::MinPlusMatrix;

pub fn parse_word(w: &str) -> Result<Vec<bool>, TrafficError> {
    w.chars()
        .map(|c| match c {
            '1' => Ok(true),
            '0' => Ok(false),
            other => Err(TrafficError::BadWord(other)),
        })
        .collect()
}

pub fn format_word(w: &[bool]) -> String {
    w.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parallel update: every car whose next cell (mod m) is empty moves.
pub fn exclusion_step(w: &[bool]) -> Vec<bool> {
    exclusion_step_counting(w).0
}

fn exclusion_step_counting(w: &[bool]) -> (Vec<bool>, usize) {
    let m = w.len();
    let mut out = w.to_vec();
    let mut moves = 0;
    for s in 0..m {
        let next = (s + 1) % m;
        if w[s] && !w[next] {
            out[s] = false;
            out[next] = true;
            moves += 1;
        }
    }
    (out, moves)
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    /// Moves per step and per cell on the eventual cycle.
    #[serde(serialize_with = "ser_ratio")]
    pub phi: Rational64,
    pub transient: usize,
    pub period: usize,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl FlowReport {
    pub fn phi_f64(&self) -> f64 {
        *self.phi.numer() as f64 / *self.phi.denom() as f64
    }
}

/// Runs until a configuration repeats and averages the moves over the cycle.
pub fn exclusion_flow(w0: &[bool], horizon: usize) -> Result<FlowReport, TrafficError> {
    let m = w0.len();
    if m == 0 {
        return Err(TrafficError::BadWord(' '));
    }
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut moves: Vec<usize> = Vec::new();
    let mut w = w0.to_vec();
    for k in 0..=horizon {
        if let Some(&start) = seen.get(&w) {
            let period = k - start;
            let total: usize = moves[start..k].iter().sum();
            return Ok(FlowReport {
                phi: Rational64::new(total as i64, (period * m) as i64),
                transient: start,
                period,
            });
        }
        seen.insert(w.clone(), k);
        let (next, mv) = exclusion_step_counting(&w);
        moves.push(mv);
        w = next;
    }
    Err(TrafficError::NoPeriod(horizon))
}

/// `q_s^{k+1} = min(a_{s−1} + q_{s−1}^k, ā_s + q_{s+1}^k)` as an `m × m`
/// minplus matrix (indices mod `m`).
pub fn road_event_graph(a: &[f64]) -> MinPlusMatrix {
    let m = a.len();
    let mut mat = MinPlusMatrix::eps(m, m);
    for s in 0..m {
        let prev = (s + m - 1) % m;
        let next = (s + 1) % m;
        mat[(s, prev)] = mat[(s, prev)].oplus(Finite(a[prev]));
        mat[(s, next)] = mat[(s, next)].oplus(Finite(1.0 - a[s]));
    }
    mat
}

pub fn occupancy(w: &[bool]) -> Vec<f64> {
    w.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
}
