//! Two roads of `n` and `m` cells crossing at one junction. Cells are
//! 1-based; `n` and `n+m` are the two junction cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrafficError;
use crate::dynamics::{HomogeneousMap, PaExpr, PaMap};

const CAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionConfig {
    pub n: usize,
    pub m: usize,
    /// `a[i−1]` is the marking of cell `i`.
    pub a: Vec<f64>,
}

impl JunctionConfig {
    pub fn new(n: usize, m: usize, a: Vec<f64>) -> Result<Self, TrafficError> {
        let cfg = Self { n, m, a };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        if self.n < 2 || self.m < 2 {
            return Err(TrafficError::BadSize(self.n, self.m));
        }
        if self.a.len() != self.big_n() {
            return Err(TrafficError::BadMarking(format!(
                "{} markings for {} cells",
                self.a.len(),
                self.big_n()
            )));
        }
        if let Some(i) = self.a.iter().position(|&x| !(-CAP_TOL..=1.0 + CAP_TOL).contains(&x)) {
            return Err(TrafficError::BadMarking(format!("a_{} = {} outside [0, 1]", i + 1, self.a[i])));
        }
        if self.junction_mass() > 1.0 + CAP_TOL {
            return Err(TrafficError::BadMarking(format!(
                "junction holds {} > 1",
                self.junction_mass()
            )));
        }
        Ok(())
    }

    pub fn big_n(&self) -> usize {
        self.n + self.m
    }

    /// Marking of cell `i` (1-based).
    pub fn ai(&self, i: usize) -> f64 {
        self.a[i - 1]
    }

    fn junction_mass(&self) -> f64 {
        self.ai(self.n) + self.ai(self.big_n())
    }

    pub fn is_junction(&self, i: usize) -> bool {
        i == self.n || i == self.big_n()
    }

    /// `ā_i`; shared `1 − a_n − a_{n+m}` on the junction cells.
    pub fn abar(&self, i: usize) -> f64 {
        if self.is_junction(i) {
            1.0 - self.junction_mass()
        } else {
            1.0 - self.ai(i)
        }
    }

    pub fn density(&self) -> f64 {
        self.a.iter().sum::<f64>() / (self.big_n() - 1) as f64
    }

    pub fn rho(&self) -> f64 {
        1.0 / self.big_n() as f64
    }

    pub fn r(&self) -> f64 {
        self.m as f64 / self.big_n() as f64
    }

    /// `b_n = Σ_{i=1}^{n−1} a_i`.
    pub fn b_n(&self) -> f64 {
        (1..self.n).map(|i| self.ai(i)).sum()
    }

    /// `b_m = Σ_{i=n+1}^{n+m−1} a_i`.
    pub fn b_m(&self) -> f64 {
        (self.n + 1..self.big_n()).map(|i| self.ai(i)).sum()
    }

    pub fn b_n_bar(&self) -> f64 {
        (self.n - 1) as f64 - self.b_n()
    }

    pub fn b_m_bar(&self) -> f64 {
        (self.m - 1) as f64 - self.b_m()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Ordinary cells get `d`, each junction cell `d/2`.
    Even,
    /// Seeded random fill respecting the caps.
    Random,
}

impl std::str::FromStr for Placement {
    type Err = TrafficError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Placement::Even),
            "random" => Ok(Placement::Random),
            other => Err(TrafficError::BadMarking(format!("unknown placement `{other}`"))),
        }
    }
}

impl std::fmt::Display for Placement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Placement::Even => "even",
            Placement::Random => "random",
        })
    }
}

/// A marking with `Σ a_i = d (N − 1)`.
pub fn marking_from_density(n: usize, m: usize, d: f64, policy: Placement, seed: u64) -> Result<JunctionConfig, TrafficError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(TrafficError::DensityOutOfRange(d));
    }
    if n < 2 || m < 2 {
        return Err(TrafficError::BadSize(n, m));
    }
    let big = n + m;
    let a = match policy {
        Placement::Even => (1..=big)
            .map(|i| if i == n || i == big { d / 2.0 } else { d })
            .collect(),
        Placement::Random => random_fill(n, m, d * (big - 1) as f64, seed),
    };
    JunctionConfig::new(n, m, a)
}

fn random_fill(n: usize, m: usize, total: f64, seed: u64) -> Vec<f64> {
    let big = n + m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0.0; big];
    let cap = |a: &[f64], i: usize| {
        if i == n || i == big {
            1.0 - a[n - 1] - a[big - 1]
        } else {
            1.0 - a[i - 1]
        }
    };
    let mut rem = total;
    let mut tries = 0;
    while rem > CAP_TOL && tries < 100 * big {
        let i = rng.gen_range(1..=big);
        let x = cap(&a, i).min(rem).min(rng.gen::<f64>());
        a[i - 1] += x;
        rem -= x;
        tries += 1;
    }
    // whatever is left goes cell by cell in order
    for i in 1..=big {
        if rem <= 0.0 {
            break;
        }
        let x = cap(&a, i).min(rem).max(0.0);
        a[i - 1] += x;
        rem -= x;
    }
    a
}

/// The junction dynamics, one step `q ↦ q'`. The update of `q_{n+m}` uses
/// the freshly computed `q_n'`.
#[derive(Debug, Clone)]
pub struct JunctionDynamics {
    pub cfg: JunctionConfig,
}

impl JunctionDynamics {
    pub fn new(cfg: JunctionConfig) -> Self {
        Self { cfg }
    }

    /// The same map as a piecewise-affine expression vector.
    pub fn to_pa_map(&self) -> PaMap {
        let c = &self.cfg;
        let (n, big) = (c.n, c.big_n());
        // variable of cell i is index i−1
        let v = |i: usize, k: f64| PaExpr::var(big, i - 1, k);
        let sp = |terms: &[(usize, f64)], k: f64| {
            PaExpr::sparse(big, &terms.iter().map(|&(i, w)| (i - 1, w)).collect::<Vec<_>>(), k)
        };
        let qn = PaExpr::min2(
            sp(&[(1, 1.0), (n + 1, 1.0), (big, -1.0)], c.abar(n)),
            v(n - 1, c.ai(n - 1)),
        );
        let exprs = (1..=big)
            .map(|i| {
                if i == n {
                    qn.clone()
                } else if i == big {
                    PaExpr::min2(
                        PaExpr::Lin {
                            terms: vec![
                                (1.0, sp(&[(1, 1.0), (n + 1, 1.0)], c.abar(big))),
                                (-1.0, qn.clone()),
                            ],
                            c: 0.0,
                        },
                        v(big - 1, c.ai(big - 1)),
                    )
                } else if i == 1 || i == n + 1 {
                    let mass = if i == 1 { c.ai(n) } else { c.ai(big) };
                    PaExpr::min2(sp(&[(n, 0.5), (big, 0.5)], mass), v(i + 1, c.abar(i)))
                } else {
                    PaExpr::min2(v(i - 1, c.ai(i - 1)), v(i + 1, c.abar(i)))
                }
            })
            .collect();
        PaMap::new(exprs)
    }
}

impl HomogeneousMap for JunctionDynamics {
    fn dim(&self) -> usize {
        self.cfg.big_n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let c = &self.cfg;
        let (n, big) = (c.n, c.big_n());
        let q = |i: usize| x[i - 1];
        for i in 2..big {
            if i != n && i != n + 1 {
                out[i - 1] = (c.ai(i - 1) + q(i - 1)).min(c.abar(i) + q(i + 1));
            }
        }
        let qn = (c.abar(n) + q(1) + q(n + 1) - q(big)).min(c.ai(n - 1) + q(n - 1));
        out[n - 1] = qn;
        out[big - 1] = (c.abar(big) + q(1) + q(n + 1) - qn).min(c.ai(big - 1) + q(big - 1));
        let half = (q(n) + q(big)) / 2.0;
        out[0] = (c.ai(n) + half).min(c.abar(1) + q(2));
        out[n] = (c.ai(big) + half).min(c.abar(n + 1) + q(n + 2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::probe_homogeneity;
    use crate::petri::models::junction;
    use rand::Rng;

    #[test]
    fn even_and_random_masses() {
        let even = marking_from_density(2, 10, 0.5, Placement::Even, 0).unwrap();
        assert!((even.a.iter().sum::<f64>() - 5.5).abs() < 1e-12);
        assert_eq!(marking_from_density(3, 4, 0.0, Placement::Even, 0).unwrap().a, vec![0.0; 7]);
        let full = marking_from_density(3, 4, 1.0, Placement::Even, 0).unwrap();
        assert_eq!(full.ai(3) + full.ai(7), 1.0);
        assert!(full.a.iter().enumerate().all(|(i, &x)| full.is_junction(i + 1) || x == 1.0));
        for seed in 0..20 {
            for d in [0.1, 0.5, 0.93, 1.0] {
                let cfg = marking_from_density(3, 5, d, Placement::Random, seed).unwrap();
                assert!((cfg.density() - d).abs() < 1e-10, "d={d} got {}", cfg.density());
            }
        }
        assert!(marking_from_density(3, 5, 1.2, Placement::Even, 0).is_err());
    }

    #[test]
    fn random_placement_is_seeded() {
        let a = marking_from_density(4, 6, 0.4, Placement::Random, 9).unwrap();
        let b = marking_from_density(4, 6, 0.4, Placement::Random, 9).unwrap();
        let c = marking_from_density(4, 6, 0.4, Placement::Random, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_configs() {
        assert!(JunctionConfig::new(1, 4, vec![0.0; 5]).is_err());
        assert!(JunctionConfig::new(2, 2, vec![0.0; 3]).is_err());
        assert!(JunctionConfig::new(2, 2, vec![0.0, 0.6, 0.0, 0.6]).is_err());
        assert!(JunctionConfig::new(2, 2, vec![1.2, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn homogeneous_and_pa_form_agree() {
        let cfg = marking_from_density(3, 4, 0.45, Placement::Random, 5).unwrap();
        let f = JunctionDynamics::new(cfg);
        assert!(probe_homogeneity(&f, 100, 3, 1e-9).passed);
        let pa = f.to_pa_map();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let x: Vec<f64> = (0..7).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let a = f.eval(&x);
            let b = pa.eval_vec(&x);
            assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));
        }
    }

    #[test]
    fn petri_net_reproduces_dynamics() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (n, m) in [(2, 2), (2, 5), (4, 3)] {
            let cfg = marking_from_density(n, m, 0.6, Placement::Random, 1).unwrap();
            let f = JunctionDynamics::new(cfg.clone());
            let rec = junction(n, m, &cfg.a).unwrap().eliminate_places().unwrap();
            for _ in 0..50 {
                let x: Vec<f64> = (0..n + m).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let a = f.eval(&x);
                let b = rec.step(&x);
                assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn freeze_config_is_stationary() {
        let cfg = JunctionConfig::new(3, 3, vec![1.0, 1.0, 0.5, 1.0, 1.0, 0.5]).unwrap();
        let f = JunctionDynamics::new(cfg);
        let mut x = vec![0.0; 6];
        for _ in 0..100 {
            x = f.eval(&x);
        }
        let y = f.eval(&x);
        assert!(x.iter().zip(&y).all(|(u, v)| (u - v).abs() < 1e-12));
    }
}
