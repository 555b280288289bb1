//! Canonical nets: the circular road event graph, the two-road junction and
//! the small conflict example used by the rewrites.

use super::net::Lag;
use super::{PetriError, PetriNet};

/// Circular road of `m = a.len()` cells, `a_s ∈ {0, 1}` (or fluid values in
/// `[0, 1]`). Transition `q_s` moves a car from cell `s−1` into cell `s`:
/// `q_s^{k+1} = min(a_{s−1} + q_{s−1}^k, ā_s + q_{s+1}^k)`.
pub fn circular_road(a: &[f64]) -> PetriNet {
    let m = a.len();
    let mut b = PetriNet::builder();
    let q: Vec<usize> = (1..=m).map(|s| b.transition(format!("q{s}"))).collect();
    for s in 0..m {
        let next = (s + 1) % m;
        let car = b.place(format!("c{}", s + 1), a[s], &[q[next]]);
        b.edge(q[s], car, 1.0);
        let free = b.place(format!("f{}", s + 1), 1.0 - a[s], &[q[s]]);
        b.edge(q[next], free, 1.0);
    }
    b.build().expect("circular road is well formed")
}

/// Two roads of `n` and `m` cells sharing the junction cells `n` and `n+m`
/// (1-based). Markings `a` (length `n+m`) are car densities per cell.
///
/// The junction is entered with equal priority from both roads, cars leaving
/// it are routed half/half, and the entry of cell `n+m` sees the same-step
/// entry of cell `n`.
pub fn junction(n: usize, m: usize, a: &[f64]) -> Result<PetriNet, PetriError> {
    if n < 2 || m < 2 {
        return Err(PetriError::Format(format!("junction needs n, m >= 2, got ({n}, {m})")));
    }
    let big = n + m;
    if a.len() != big {
        return Err(PetriError::DimensionMismatch {
            expected: big,
            found: a.len(),
        });
    }
    let mut b = PetriNet::builder();
    let q: Vec<usize> = (1..=big).map(|i| b.transition(format!("q{i}"))).collect();
    // 1-based helpers
    let qi = |i: usize| q[i - 1];
    let ai = |i: usize| a[i - 1];
    let is_junction = |i: usize| i == n || i == big;
    for j in (1..=big).filter(|&j| !is_junction(j)) {
        let car = b.place(format!("c{j}"), ai(j), &[qi(j + 1)]);
        b.edge(qi(j), car, 1.0);
        let free = b.place(format!("f{j}"), 1.0 - ai(j), &[qi(j)]);
        b.edge(qi(j + 1), free, 1.0);
    }
    for (cell, target) in [(n, 1), (big, n + 1)] {
        let car = b.place(format!("c{cell}"), ai(cell), &[qi(target)]);
        b.edge(qi(n), car, 0.5);
        b.edge(qi(big), car, 0.5);
    }
    let free_j = 1.0 - ai(n) - ai(big);
    let auth_n = b.place(format!("f{n}"), free_j, &[qi(n)]);
    b.edge(qi(1), auth_n, 1.0);
    b.edge(qi(n + 1), auth_n, 1.0);
    b.edge(qi(big), auth_n, -1.0);
    let auth_m = b.place(format!("f{big}"), free_j, &[qi(big)]);
    b.edge(qi(1), auth_m, 1.0);
    b.edge(qi(n + 1), auth_m, 1.0);
    b.edge_with_lag(qi(n), auth_m, -1.0, Lag::Current);
    b.build()
}

/// `q1` and `q2` (unit-rate clocks) feed the place `p` with marking `a`,
/// which has two downstream transitions `q3` and `q4`: a conflict.
pub fn homog_example(a: f64) -> PetriNet {
    let mut b = PetriNet::builder();
    let q: Vec<usize> = (1..=4).map(|i| b.transition(format!("q{i}"))).collect();
    for i in 0..2 {
        let clock = b.place(format!("c{}", i + 1), 1.0, &[q[i]]);
        b.edge(q[i], clock, 1.0);
    }
    let p = b.place("p", a, &[q[2], q[3]]);
    b.edge(q[0], p, 1.0);
    b.edge(q[1], p, 1.0);
    b.build().expect("example is well formed")
}
