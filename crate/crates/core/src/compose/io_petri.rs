use serde::Serialize;

use super::ComposeError;
use crate::petri::{Lag, PetriNet};
use crate::scalar::{ExtendedReal, Finite};

/// A Petri net split into input, state and output transitions `(V, Q, Z)`
/// and places `(U, P, Y)`:
///
/// ```text
/// P^{k+1} = A Q^k + B V^k
/// Q^{k+1} = C ⊗ P^{k+1} ⊕ D ⊗ U^{k+1}
/// Y^{k+1} = E Q^k
/// Z^{k+1} = F ⊗ P^{k+1}
/// ```
#[derive(Debug, Clone)]
pub struct IOPetriSystem {
    pub v: Vec<usize>,
    pub q: Vec<usize>,
    pub z: Vec<usize>,
    pub u: Vec<usize>,
    pub p: Vec<usize>,
    pub y: Vec<usize>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<ExtendedReal>>,
    d: Vec<Vec<ExtendedReal>>,
    e: Vec<Vec<f64>>,
    f: Vec<Vec<ExtendedReal>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IoTrace {
    /// `Q^0 … Q^K`.
    pub q: Vec<Vec<ExtendedReal>>,
    /// `P^1 … P^K`, and likewise below.
    pub p: Vec<Vec<ExtendedReal>>,
    pub y: Vec<Vec<ExtendedReal>>,
    pub z: Vec<Vec<ExtendedReal>>,
}

fn position(v: &[usize], x: usize) -> Option<usize> {
    v.iter().position(|&e| e == x)
}

fn std_dot(row: &[f64], x: &[ExtendedReal]) -> ExtendedReal {
    row.iter().zip(x).fold(Finite(0.0), |acc, (&m, &v)| acc.add(Finite(m).mul(v)))
}

fn mp_dot(row: &[ExtendedReal], x: &[ExtendedReal]) -> ExtendedReal {
    row.iter().zip(x).fold(ExtendedReal::PosInf, |acc, (&m, &v)| acc.oplus(m.otimes(v)))
}

impl IOPetriSystem {
    /// Inputs are the nodes without upstream edges, outputs those without
    /// downstream edges. A node with neither counts as an input.
    pub fn from_net(net: &PetriNet) -> Result<Self, ComposeError> {
        let tn = net.transition_names();
        let pn = net.place_names();
        let conflicts: Vec<String> = (0..net.place_count())
            .filter(|&pl| net.downstream(pl).len() > 1)
            .map(|pl| pn[pl].clone())
            .collect();
        if !conflicts.is_empty() {
            return Err(ComposeError::Petri(crate::petri::PetriError::NonDeterministic(conflicts)));
        }
        if let Some(e) = net.edges().iter().find(|e| e.lag == Lag::Current) {
            return Err(ComposeError::ImplicitEdge {
                transition: tn[e.transition].clone(),
                place: pn[e.place].clone(),
            });
        }
        let mut produces = vec![false; net.transition_count()];
        let mut produced = vec![false; net.place_count()];
        for e in net.edges() {
            produces[e.transition] = true;
            produced[e.place] = true;
        }
        let (mut v, mut q, mut z) = (vec![], vec![], vec![]);
        for t in 0..net.transition_count() {
            if net.in_places(t).is_empty() {
                v.push(t);
            } else if !produces[t] {
                z.push(t);
            } else {
                q.push(t);
            }
        }
        let (mut u, mut p, mut y) = (vec![], vec![], vec![]);
        for pl in 0..net.place_count() {
            if !produced[pl] {
                u.push(pl);
            } else if net.downstream(pl).is_empty() {
                y.push(pl);
            } else {
                p.push(pl);
            }
        }
        let mut a = vec![vec![0.0; q.len()]; p.len()];
        let mut b = vec![vec![0.0; v.len()]; p.len()];
        let mut e_blk = vec![vec![0.0; q.len()]; y.len()];
        for e in net.edges() {
            let unsupported = || {
                ComposeError::Unsupported(format!(
                    "edge {} -> {} has no block in the input-output form",
                    tn[e.transition], pn[e.place]
                ))
            };
            if let Some(i) = position(&p, e.place) {
                if let Some(j) = position(&q, e.transition) {
                    a[i][j] += e.multiplicity;
                } else if let Some(j) = position(&v, e.transition) {
                    b[i][j] += e.multiplicity;
                } else {
                    return Err(unsupported());
                }
            } else if let Some(i) = position(&y, e.place) {
                let j = position(&q, e.transition).ok_or_else(unsupported)?;
                e_blk[i][j] += e.multiplicity;
            } else {
                return Err(unsupported());
            }
        }
        let eps = ExtendedReal::PosInf;
        let mut c = vec![vec![eps; p.len()]; q.len()];
        let mut d = vec![vec![eps; u.len()]; q.len()];
        let mut f = vec![vec![eps; p.len()]; z.len()];
        let mark = net.markings();
        for (i, &t) in q.iter().enumerate() {
            for &pl in net.in_places(t) {
                if let Some(j) = position(&p, pl) {
                    c[i][j] = Finite(mark[pl]);
                } else if let Some(j) = position(&u, pl) {
                    d[i][j] = Finite(mark[pl]);
                }
            }
        }
        for (i, &t) in z.iter().enumerate() {
            for &pl in net.in_places(t) {
                let j = position(&p, pl).ok_or_else(|| {
                    ComposeError::Unsupported(format!("output transition {} fed by input place {}", tn[t], pn[pl]))
                })?;
                f[i][j] = Finite(mark[pl]);
            }
        }
        Ok(Self {
            v,
            q,
            z,
            u,
            p,
            y,
            a,
            b,
            c,
            d,
            e: e_blk,
            f,
        })
    }

    fn check(&self, what: &'static str, expected: usize, found: usize) -> Result<(), ComposeError> {
        if expected == found {
            Ok(())
        } else {
            Err(ComposeError::Dimension { what, expected, found })
        }
    }

    /// `(Q^k, V^k, U^{k+1}) ↦ (P^{k+1}, Q^{k+1}, Y^{k+1}, Z^{k+1})`.
    #[allow(clippy::type_complexity)]
    pub fn step(
        &self,
        q: &[ExtendedReal],
        v: &[ExtendedReal],
        u_next: &[ExtendedReal],
    ) -> Result<(Vec<ExtendedReal>, Vec<ExtendedReal>, Vec<ExtendedReal>, Vec<ExtendedReal>), ComposeError> {
        self.check("state transitions", self.q.len(), q.len())?;
        self.check("input transitions", self.v.len(), v.len())?;
        self.check("input places", self.u.len(), u_next.len())?;
        let p: Vec<ExtendedReal> = (0..self.p.len())
            .map(|i| std_dot(&self.a[i], q).add(std_dot(&self.b[i], v)))
            .collect();
        let q_next = (0..self.q.len())
            .map(|i| mp_dot(&self.c[i], &p).oplus(mp_dot(&self.d[i], u_next)))
            .collect();
        let y = self.e.iter().map(|row| std_dot(row, q)).collect();
        let z = self.f.iter().map(|row| mp_dot(row, &p)).collect();
        Ok((p, q_next, y, z))
    }

    /// `v[k] = V^k`, `u[k] = U^{k+1}`.
    pub fn simulate(
        &self,
        q0: &[ExtendedReal],
        v: &[Vec<ExtendedReal>],
        u: &[Vec<ExtendedReal>],
    ) -> Result<IoTrace, ComposeError> {
        self.check("input stream length", v.len(), u.len())?;
        let mut tr = IoTrace {
            q: vec![q0.to_vec()],
            p: vec![],
            y: vec![],
            z: vec![],
        };
        for (vk, uk) in v.iter().zip(u) {
            let (p, q, y, z) = self.step(tr.q.last().expect("non-empty"), vk, uk)?;
            tr.p.push(p);
            tr.q.push(q);
            tr.y.push(y);
            tr.z.push(z);
        }
        Ok(tr)
    }
}
