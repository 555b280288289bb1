use serde::{Deserialize, Serialize};

use super::net::Lag;
use super::{PetriError, PetriNet};
use crate::scalar::{ExtendedReal, Finite, EPS};
use crate::tropical::MinPlusMatrix;

/// Cumulated quantities at step `k`: tokens arrived in each place and firings
/// of each transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub k: u64,
}

impl NetState {
    pub fn zero(net: &PetriNet) -> Self {
        Self {
            p: vec![0.0; net.place_count()],
            q: vec![0.0; net.transition_count()],
            k: 0,
        }
    }

    pub fn from_firings(net: &PetriNet, q: Vec<f64>) -> Result<Self, PetriError> {
        if q.len() != net.transition_count() {
            return Err(PetriError::DimensionMismatch {
                expected: net.transition_count(),
                found: q.len(),
            });
        }
        Ok(Self {
            p: vec![0.0; net.place_count()],
            q,
            k: 0,
        })
    }
}

fn ext(v: &[f64]) -> Vec<ExtendedReal> {
    v.iter().map(|&x| ExtendedReal::from(x)).collect()
}

fn plain(v: &[ExtendedReal]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64()).collect()
}

impl PetriNet {
    /// `P_p^{k+1} = Σ m_pq Q_q^{k+1−lag}`.
    fn place_value(&self, p: usize, prev: &[ExtendedReal], next: &[ExtendedReal]) -> ExtendedReal {
        self.place_inputs(p).fold(Finite(0.0), |acc, e| {
            let q = match e.lag {
                Lag::Previous => prev[e.transition],
                Lag::Current => next[e.transition],
            };
            acc.add(Finite(e.multiplicity).mul(q))
        })
    }

    /// One step of the dynamics from the previous firing vector, evaluating
    /// transitions in same-step order.
    pub(crate) fn advance(&self, prev: &[ExtendedReal]) -> (Vec<ExtendedReal>, Vec<ExtendedReal>) {
        let mut next = vec![EPS; self.transition_count()];
        for &t in self.order() {
            next[t] = self.in_places(t).iter().fold(EPS, |acc, &p| {
                acc.oplus(Finite(self.markings()[p]).otimes(self.place_value(p, prev, &next)))
            });
        }
        let places = (0..self.place_count())
            .map(|p| self.place_value(p, prev, &next))
            .collect();
        (places, next)
    }

    fn require_deterministic(&self) -> Result<(), PetriError> {
        let det = self.validate_deterministic();
        if det.deterministic {
            Ok(())
        } else {
            Err(PetriError::NonDeterministic(det.offending.into_iter().map(|(p, _)| p).collect()))
        }
    }

    /// `P^{k+1} = H·Q^k`, `Q^{k+1} = D ⊗ P^{k+1}`.
    pub fn step(&self, s: &NetState) -> Result<NetState, PetriError> {
        self.require_deterministic()?;
        if s.q.len() != self.transition_count() {
            return Err(PetriError::DimensionMismatch {
                expected: self.transition_count(),
                found: s.q.len(),
            });
        }
        let (p, q) = self.advance(&ext(&s.q));
        Ok(NetState {
            p: plain(&p),
            q: plain(&q),
            k: s.k + 1,
        })
    }

    /// `steps` applications of [`PetriNet::step`]; the result starts with `s0`.
    pub fn simulate(&self, s0: &NetState, steps: usize) -> Result<Vec<NetState>, PetriError> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(s0.clone());
        for _ in 0..steps {
            let next = self.step(out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn eliminate_places(&self) -> Result<TransitionRecursion, PetriError> {
        self.require_deterministic()?;
        Ok(TransitionRecursion { net: self.clone() })
    }

    pub fn eliminate_transitions(&self) -> Result<PlaceRecursion, PetriError> {
        self.require_deterministic()?;
        Ok(PlaceRecursion { net: self.clone() })
    }

    /// Constraint residuals of a firing trajectory `qs[0..=K]`.
    ///
    /// Entry `[k−1][q]` is
    /// `min_{p ∈ q^in} (a_p + Σ_{q'} m_pq' q'^{k−lag} − Σ_{q'' ∈ p^out} q''^k)`,
    /// `None` for a transition without input places. Valid trajectories give 0.
    pub fn constraint_residual(&self, qs: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
        (1..qs.len())
            .map(|k| {
                let prev = ext(&qs[k - 1]);
                let cur = ext(&qs[k]);
                (0..self.transition_count())
                    .map(|t| {
                        let ins = self.in_places(t);
                        if ins.is_empty() {
                            return None;
                        }
                        let r = ins.iter().fold(EPS, |acc, &p| {
                            let consumed = self
                                .downstream(p)
                                .iter()
                                .fold(Finite(0.0), |s, &q2| s.add(cur[q2]));
                            let avail = Finite(self.markings()[p]).add(self.place_value(p, &prev, &cur));
                            acc.oplus(avail.add(consumed.neg()))
                        });
                        Some(r.to_f64())
                    })
                    .collect()
            })
            .collect()
    }
}

/// Largest `|residual|` over constrained entries; `+∞` if any is not finite.
pub fn max_residual(res: &[Vec<Option<f64>>]) -> f64 {
    res.iter()
        .flatten()
        .flatten()
        .map(|r| if r.is_finite() { r.abs() } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

/// Transition-only recursion `Q^{k+1} = D ⊗ (H·Q^k)`.
#[derive(Debug, Clone)]
pub struct TransitionRecursion {
    net: PetriNet,
}

impl TransitionRecursion {
    pub fn dim(&self) -> usize {
        self.net.transition_count()
    }

    pub fn step(&self, q: &[f64]) -> Vec<f64> {
        plain(&self.net.advance(&ext(q)).1)
    }

    pub fn step_ext(&self, q: &[ExtendedReal]) -> Vec<ExtendedReal> {
        self.net.advance(q).1
    }

    /// For event graphs the recursion is `Q^{k+1} = A ⊗ Q^k` with
    /// `A_{q'q} = min a_p` over places `q → p → q'`.
    pub fn minplus_matrix(&self) -> Option<MinPlusMatrix> {
        if !self.net.is_event_graph() {
            return None;
        }
        let n = self.dim();
        let mut a = MinPlusMatrix::eps(n, n);
        for e in self.net.edges() {
            let q2 = self.net.downstream(e.place)[0];
            let w = Finite(self.net.markings()[e.place]);
            a[(q2, e.transition)] = a[(q2, e.transition)].oplus(w);
        }
        Some(a)
    }
}

/// Place-only recursion `P^{k+1} = H·(D ⊗ P^k)`.
#[derive(Debug, Clone)]
pub struct PlaceRecursion {
    net: PetriNet,
}

impl PlaceRecursion {
    pub fn dim(&self) -> usize {
        self.net.place_count()
    }

    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        let p = ext(p);
        let q: Vec<ExtendedReal> = (0..self.net.transition_count())
            .map(|t| {
                self.net
                    .in_places(t)
                    .iter()
                    .fold(EPS, |acc, &pl| acc.oplus(Finite(self.net.markings()[pl]).otimes(p[pl])))
            })
            .collect();
        plain(&self.net.advance(&q).0)
    }
}
