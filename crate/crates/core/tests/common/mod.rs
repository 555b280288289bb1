#![allow(dead_code)]

use minplus::compose::SystemDyn;
use minplus::hybrid::{HybridMatrix, RowKind};
use minplus::ExtendedReal;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ORACLE_TOL: f64 = 1e-12;

pub fn kinds(rng: &mut ChaCha8Rng, n: usize) -> Vec<RowKind> {
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { RowKind::Standard } else { RowKind::MinPlus })
        .collect()
}

/// A row of a homogeneous hybrid system. Standard rows get nonnegative
/// weights summing to 1, minplus rows finite shifts in `[0, 3]` with some
/// `ε`. `allowed[j]` false forces the null entry.
fn random_row(rng: &mut ChaCha8Rng, kind: RowKind, allowed: &[bool]) -> Vec<f64> {
    let n = allowed.len();
    match kind {
        RowKind::Standard => {
            let mut w: Vec<f64> = (0..n)
                .map(|j| if allowed[j] && rng.gen_bool(0.8) { rng.gen_range(0.0..1.0) } else { 0.0 })
                .collect();
            if w.iter().all(|&x| x == 0.0) {
                if let Some(j) = (0..n).find(|&j| allowed[j]) {
                    w[j] = 1.0;
                }
            }
            let s: f64 = w.iter().sum();
            w.iter().map(|x| if s == 0.0 { 0.0 } else { x / s }).collect()
        }
        RowKind::MinPlus => {
            let mut r: Vec<f64> = (0..n)
                .map(|j| if allowed[j] && rng.gen_bool(0.7) { rng.gen_range(0.0..3.0) } else { f64::INFINITY })
                .collect();
            if r.iter().all(|x| x.is_infinite()) {
                if let Some(j) = (0..n).find(|&j| allowed[j]) {
                    r[j] = rng.gen_range(0.0..3.0);
                }
            }
            r
        }
    }
}

pub struct Signature {
    pub states: Vec<RowKind>,
    pub inputs: Vec<RowKind>,
    pub outputs: Vec<RowKind>,
}

/// Random homogeneous system. With `same_kind_inputs`, a state row only
/// reads inputs of its own kind; with `standard_rows_ignore_inputs`, the
/// `B` block of standard rows is null.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    same_kind_inputs: bool,
    standard_rows_ignore_inputs: bool,
) -> SystemDyn {
    let (n, ni) = (sig.states.len(), sig.inputs.len());
    let mut ra = Vec::new();
    let mut rb = Vec::new();
    for &k in &sig.states {
        let allowed: Vec<bool> = (0..n)
            .map(|_| true)
            .chain(sig.inputs.iter().map(|&ik| {
                !(same_kind_inputs && ik != k) && !(standard_rows_ignore_inputs && k == RowKind::Standard)
            }))
            .collect();
        let row = random_row(rng, k, &allowed);
        ra.push(row[..n].to_vec());
        rb.push(row[n..].to_vec());
    }
    let rc: Vec<Vec<f64>> = sig.outputs.iter().map(|&k| random_row(rng, k, &vec![true; n])).collect();
    let a = HybridMatrix::from_f64_rows(sig.states.clone(), sig.states.clone(), &ra).unwrap();
    let b = HybridMatrix::from_f64_rows(sig.states.clone(), sig.inputs.clone(), &rb).unwrap();
    let c = HybridMatrix::from_f64_rows(sig.outputs.clone(), sig.states.clone(), &rc).unwrap();
    let x0 = (0..n).map(|_| ExtendedReal::Finite(rng.gen_range(0.0..5.0))).collect();
    let s = SystemDyn::with_initial(a, b, c, x0).unwrap();
    assert_eq!(s.input_kinds().len(), ni);
    s
}

pub fn random_signature(rng: &mut ChaCha8Rng, inputs: Vec<RowKind>, outputs: Vec<RowKind>) -> Signature {
    let n = rng.gen_range(1..=4);
    Signature {
        states: kinds(rng, n),
        inputs,
        outputs,
    }
}

pub fn random_stream(rng: &mut ChaCha8Rng, width: usize, len: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|_| (0..width).map(|_| rng.gen_range(0.0..10.0)).collect())
        .collect()
}

pub fn lift(v: &[Vec<f64>]) -> Vec<Vec<ExtendedReal>> {
    v.iter().map(|r| r.iter().map(|&x| ExtendedReal::Finite(x)).collect()).collect()
}

/// Plain-float reference for one system, independent of the library's
/// block evaluation.
pub struct RefSystem {
    pub states: Vec<RowKind>,
    pub outputs: Vec<RowKind>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub x: Vec<f64>,
}

fn dense(m: &HybridMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_f64()).collect()).collect()
}

pub fn row_eval(kind: RowKind, row: &[f64], x: &[f64]) -> f64 {
    match kind {
        RowKind::Standard => row.iter().zip(x).map(|(w, v)| w * v).sum(),
        RowKind::MinPlus => row.iter().zip(x).map(|(w, v)| w + v).fold(f64::INFINITY, f64::min),
    }
}

pub fn signal_plus(kind: RowKind, a: f64, b: f64) -> f64 {
    match kind {
        RowKind::Standard => a + b,
        RowKind::MinPlus => a.min(b),
    }
}

impl RefSystem {
    pub fn of(s: &SystemDyn) -> Self {
        Self {
            states: s.state_kinds().to_vec(),
            outputs: s.output_kinds().to_vec(),
            a: dense(s.a()),
            b: dense(s.b()),
            c: dense(s.c()),
            x: s.x0().iter().map(|v| v.to_f64()).collect(),
        }
    }

    pub fn output_now(&self) -> Vec<f64> {
        self.outputs.iter().zip(&self.c).map(|(&k, r)| row_eval(k, r, &self.x)).collect()
    }

    /// Advances one step and returns `Y^{k+1} = C X^k`.
    pub fn step(&mut self, u: &[f64]) -> Vec<f64> {
        let y = self.output_now();
        let x: Vec<f64> = (0..self.states.len())
            .map(|i| {
                let k = self.states[i];
                signal_plus(k, row_eval(k, &self.a[i], &self.x), row_eval(k, &self.b[i], u))
            })
            .collect();
        self.x = x;
        y
    }

    pub fn run(&mut self, us: &[Vec<f64>]) -> Vec<Vec<f64>> {
        us.iter().map(|u| self.step(u)).collect()
    }
}

pub fn oracle_parallel(s1: &SystemDyn, s2: &SystemDyn, us: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let y1 = RefSystem::of(s1).run(us);
    let y2 = RefSystem::of(s2).run(us);
    let kinds = s1.output_kinds();
    y1.iter()
        .zip(&y2)
        .map(|(a, b)| (0..a.len()).map(|i| signal_plus(kinds[i], a[i], b[i])).collect())
        .collect()
}

/// `S1(S2(U))`, feeding S1 with `Y2^k`, where `Y2^0 = C2 X2^0`.
pub fn oracle_series(s1: &SystemDyn, s2: &SystemDyn, us: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut r2 = RefSystem::of(s2);
    let mut feed = vec![r2.output_now()];
    feed.extend(r2.run(us));
    feed.pop();
    RefSystem::of(s1).run(&feed)
}

/// `Y = S(U ⊞ Y)` with `⊞` taken per signal kind and `Y^0 = C X^0`.
pub fn oracle_feedback(s: &SystemDyn, us: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut r = RefSystem::of(s);
    let kinds = s.input_kinds().to_vec();
    let mut y = r.output_now();
    let mut out = Vec::new();
    for u in us {
        let w: Vec<f64> = (0..u.len()).map(|i| signal_plus(kinds[i], u[i], y[i])).collect();
        y = r.step(&w);
        out.push(y.clone());
    }
    out
}

pub fn max_gap(got: &[Vec<ExtendedReal>], want: &[Vec<f64>]) -> f64 {
    got.iter()
        .zip(want)
        .flat_map(|(g, w)| g.iter().zip(w))
        .map(|(g, &w)| {
            let g = g.to_f64();
            if g == w {
                0.0
            } else {
                (g - w).abs()
            }
        })
        .fold(0.0, f64::max)
}

pub struct CompositionReport {
    pub parallel: f64,
    pub series: f64,
    pub feedback: f64,
}

/// `trials` random systems per operator, `steps`-long input streams.
pub fn composition_oracle(seed: u64, trials: usize, steps: usize) -> CompositionReport {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CompositionReport {
        parallel: 0.0,
        series: 0.0,
        feedback: 0.0,
    };
    for _ in 0..trials {
        let ni = rng.gen_range(1..=2);
        let no = rng.gen_range(1..=2);
        let ins = kinds(&mut rng, ni);
        let outs = kinds(&mut rng, no);
        let us = random_stream(&mut rng, ni, steps);

        let sig1 = random_signature(&mut rng, ins.clone(), outs.clone());
        let sig2 = random_signature(&mut rng, ins.clone(), outs.clone());
        let s1 = random_system(&mut rng, &sig1, false, false);
        let s2 = random_system(&mut rng, &sig2, false, false);
        let got = SystemDyn::parallel(&s1, &s2).unwrap().simulate(&lift(&us)).unwrap().outputs;
        rep.parallel = rep.parallel.max(max_gap(&got, &oracle_parallel(&s1, &s2, &us)));

        let nm = rng.gen_range(1..=2);
        let mid = kinds(&mut rng, nm);
        let sig_inner = random_signature(&mut rng, ins.clone(), mid.clone());
        let sig_outer = random_signature(&mut rng, mid, outs.clone());
        let inner = random_system(&mut rng, &sig_inner, false, false);
        let outer = random_system(&mut rng, &sig_outer, false, false);
        let got = SystemDyn::series(&outer, &inner).unwrap().simulate(&lift(&us)).unwrap().outputs;
        rep.series = rep.series.max(max_gap(&got, &oracle_series(&outer, &inner, &us)));

        let sig_fb = random_signature(&mut rng, ins.clone(), ins.clone());
        let s = random_system(&mut rng, &sig_fb, true, false);
        let got = SystemDyn::feedback(&s).unwrap().simulate(&lift(&us)).unwrap().outputs;
        rep.feedback = rep.feedback.max(max_gap(&got, &oracle_feedback(&s, &us)));
    }
    rep
}
