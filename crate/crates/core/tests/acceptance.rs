//! Acceptance suite. Each test prints one `PASS`/`FAIL` line, then asserts.
//!
//! Run with `cargo test -p minplus --test acceptance -- --nocapture --test-threads=1`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use minplus::dynamics::tent::{tent_fixed_points, tent_growth_rate_exact, tent_monte_carlo};
use minplus::dynamics::{estimate_from, HomogeneousMap};
use minplus::hybrid::{non_associativity_witness, HybridMatrix, HybridVector, RowKind};
use minplus::petri::models::{circular_road, homog_example, junction};
use minplus::petri::{build_priority_resolution, build_routing_resolution, max_residual, NetState, PetriNet};
use minplus::traffic::{
    density_grid, diagram_sweep, exclusion_flow, exclusion_step, format_word, junction_eigenpairs, junction_lambda_approx,
    junction_lambda_exact, marking_from_density, parse_word, road_event_graph, JunctionDynamics, Phase, PhaseBoundaries,
    Placement, SimParams,
};
use minplus::tropical::{cycle_weight, min_mean_cycle, MinPlusMatrix, PrecedenceGraph};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id:>2} [{name}]: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

// ---------------------------------------------------------------- 1

/// Lightest mean over all simple cycles, as `(weight, length)`.
fn enumerate_min_mean(w: &[Vec<Option<i64>>]) -> (i64, i64) {
    let n = w.len();
    let mut best: Option<(i64, i64)> = None;
    fn dfs(
        w: &[Vec<Option<i64>>],
        start: usize,
        v: usize,
        on_path: &mut Vec<bool>,
        weight: i64,
        len: i64,
        best: &mut Option<(i64, i64)>,
    ) {
        for (u, e) in w[v].iter().enumerate() {
            let Some(e) = *e else { continue };
            if u == start {
                let (cw, cl) = (weight + e, len + 1);
                if best.map_or(true, |(bw, bl)| cw * bl < bw * cl) {
                    *best = Some((cw, cl));
                }
            } else if u > start && !on_path[u] {
                on_path[u] = true;
                dfs(w, start, u, on_path, weight + e, len + 1, best);
                on_path[u] = false;
            }
        }
    }
    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        dfs(w, s, s, &mut on_path, 0, 0, &mut best);
    }
    best.expect("strongly connected graphs have a cycle")
}

fn random_strongly_connected(rng: &mut ChaCha8Rng) -> Vec<Vec<Option<i64>>> {
    let n = rng.gen_range(1..=8);
    let p = rng.gen_range(0.1..0.7);
    let mut w: Vec<Vec<Option<i64>>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_bool(p).then(|| rng.gen_range(-10..=10))).collect())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for t in 0..n {
        let (a, b) = (perm[t], perm[(t + 1) % n]);
        if w[a][b].is_none() {
            w[a][b] = Some(rng.gen_range(-10..=10));
        }
    }
    w
}

#[test]
fn min_mean_cycle_matches_cycle_enumeration() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    for trial in 0..1000 {
        let w = random_strongly_connected(&mut rng);
        let rows: Vec<Vec<f64>> = w
            .iter()
            .map(|r| r.iter().map(|e| e.map_or(f64::INFINITY, |x| x as f64)).collect())
            .collect();
        let a = MinPlusMatrix::from_f64_rows(&rows).unwrap();
        let (ow, ol) = enumerate_min_mean(&w);
        let stats = min_mean_cycle(&a).unwrap();
        let graph = PrecedenceGraph::from_matrix(&a).unwrap();
        let ok = stats.mean_weight == ow as f64 / ol as f64
            && cycle_weight(&graph, &stats.nodes) == Some(stats.weight)
            && Rational64::new(stats.weight as i64, stats.length() as i64) == Rational64::new(ow, ol);
        if !ok {
            mismatches.push(format!("trial {trial}: got {} want {ow}/{ol}", stats.mean_weight));
        }
    }
    let elapsed = started.elapsed();
    let pass = mismatches.is_empty() && elapsed < Duration::from_secs(10);
    report(
        1,
        "min mean cycle vs enumeration",
        pass,
        &format!("1000 matrices, {} mismatches, {:.2?}", mismatches.len(), elapsed),
    );
    assert!(pass, "{mismatches:?}, {elapsed:?}");
}

// ---------------------------------------------------------------- 2

#[test]
fn circular_road_flow_is_min_density() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = Vec::new();
    let mut cases = 0;
    for m in 1..=30usize {
        for n in 0..=m {
            let want = Rational64::new(n.min(m - n) as i64, m as i64);
            let packed: Vec<bool> = (0..m).map(|s| s < n).collect();
            let mut shuffled = packed.clone();
            shuffled.shuffle(&mut rng);
            for w in [packed, shuffled] {
                cases += 1;
                let flow = exclusion_flow(&w, 10 * m + 10).unwrap().phi;
                let a: Vec<f64> = w.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                let stats = min_mean_cycle(&road_event_graph(&a)).unwrap();
                let eig = Rational64::new(stats.weight as i64, stats.length() as i64);
                let eig_float_ok = stats.mean_weight == *want.numer() as f64 / *want.denom() as f64;
                if flow != want || eig != want || !eig_float_ok {
                    bad.push(format!("{} flow {flow} eig {eig} want {want}", format_word(&w)));
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = bad.is_empty() && elapsed < Duration::from_secs(30);
    report(
        2,
        "road flow = event graph eigenvalue",
        pass,
        &format!("{cases} words, {} mismatches, {:.2?}", bad.len(), elapsed),
    );
    assert!(pass, "{bad:?}");
}

// ---------------------------------------------------------------- 3

#[test]
fn exclusion_trace_word_sequence() {
    let expected = ["1101001001", "1010100101", "0101010011", "1010101010", "0101010101"];
    let mut w = parse_word(expected[0]).unwrap();
    let mut got = vec![format_word(&w)];
    for _ in 1..expected.len() {
        w = exclusion_step(&w);
        got.push(format_word(&w));
    }
    let pass = got == expected;
    report(3, "exclusion trace", pass, &got.join(" -> "));
    assert!(pass);
}

// ---------------------------------------------------------------- 4

#[test]
fn tent_fixed_points_and_growth_rates() {
    let fp = tent_fixed_points();
    let ys: Vec<f64> = fp.points.iter().map(|p| p.y[0]).collect();
    let fixed_ok = ys.len() == 2 && ys[0].abs() < 1e-12 && (ys[1] - 2.0 / 3.0).abs() < 1e-12;

    let exact = tent_growth_rate_exact(Rational64::new(2, 5), 1000);
    let exact_ok = exact == Some(Rational64::new(4, 5));

    let mc = tent_monte_carlo(20_240_601, 100_000, 1_000_003);
    let mc_ok = (0.48..=0.52).contains(&mc.chi);

    let rates: Vec<f64> = exact.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).chain([mc.chi]).collect();
    let distinct_ok = rates.iter().all(|&g| ys.iter().all(|&y| (g - y).abs() > 1e-6));

    let pass = fixed_ok && exact_ok && mc_ok && distinct_ok;
    let exact_txt = exact.map_or("none".to_string(), |r| r.to_string());
    report(
        4,
        "tent system",
        pass,
        &format!(
            "fixed points {ys:?} ({}); period-2 rate {exact_txt} vs 4/5 ({}); Monte Carlo χ {:.5} ({}); rates differ from eigenvalues ({})",
            verdict(fixed_ok),
            verdict(exact_ok),
            mc.chi,
            verdict(mc_ok),
            verdict(distinct_ok)
        ),
    );
    assert!(pass);
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

// ---------------------------------------------------------------- 5

/// `max_i |f_i(q) − q_i − λ|` straight from the dynamics.
fn dynamics_residual(dyn_map: &JunctionDynamics, lambda: f64, q: &[f64]) -> f64 {
    dyn_map
        .eval(q)
        .iter()
        .zip(q)
        .map(|(f, x)| (f - x - lambda).abs())
        .fold(0.0, f64::max)
}

#[test]
fn junction_eigenpairs_satisfy_dynamics() {
    let sizes = [(2, 10), (3, 9), (5, 7), (4, 4)];
    let mut configs = 0;
    let mut phases = BTreeSet::new();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for &(n, m) in &sizes {
        let b = PhaseBoundaries::new(n, m);
        let mut grid = density_grid(51);
        grid.extend([b.alpha, b.beta, b.gamma].into_iter().filter(|d| (0.0..=1.0).contains(d)));
        for d in grid {
            let cfg = marking_from_density(n, m, d, Placement::Even, 0).unwrap();
            let f = JunctionDynamics::new(cfg.clone());
            configs += 1;
            let pairs = junction_eigenpairs(&cfg).unwrap();
            let lam = junction_lambda_exact(&cfg).unwrap();
            for p in &pairs {
                let r = dynamics_residual(&f, p.lambda, &p.q);
                worst = worst.max(r);
                phases.insert(p.phase);
                if r >= 1e-9 {
                    failures.push(format!("({n},{m}) d={d:.4} {}: residual {r:e}", p.phase));
                }
            }
            if let Some(rc) = lam.recession {
                println!(
                    "  recession ({n},{m}) d={d:.4}: table λ={:.6} {}, alternative λ={:.6} {}",
                    rc.table_lambda,
                    verdict(rc.table_pass),
                    rc.alt_lambda,
                    verdict(rc.alt_pass)
                );
                if !(rc.table_pass || rc.alt_pass) {
                    failures.push(format!("({n},{m}) d={d:.4}: neither recession formula passes"));
                }
            }
        }
    }
    let all_phases = phases.len() == Phase::ALL.len();
    let pass = configs >= 200 && all_phases && failures.is_empty();
    report(
        5,
        "junction eigenpairs",
        pass,
        &format!(
            "{configs} configs, phases {:?}, max residual {worst:e}, {} failures",
            phases.iter().map(|p| p.label()).collect::<Vec<_>>(),
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

// ---------------------------------------------------------------- 6

struct TrajectoryCheck {
    decreases: usize,
    first_decrease: Option<(usize, usize, f64)>,
    spread_early: f64,
    spread_all: f64,
    chi_max: f64,
}

fn spread(x: &[f64]) -> f64 {
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn junction_trajectory(n: usize, m: usize, d: f64, k0: usize, k: usize, early: usize) -> TrajectoryCheck {
    let cfg = marking_from_density(n, m, d, Placement::Even, 0).unwrap();
    let f = JunctionDynamics::new(cfg);
    let mut x = vec![0.0; n + m];
    let mut at_k0 = x.clone();
    let mut out = TrajectoryCheck {
        decreases: 0,
        first_decrease: None,
        spread_early: 0.0,
        spread_all: 0.0,
        chi_max: 0.0,
    };
    for step in 1..=k {
        let next = f.eval(&x);
        for (i, (a, b)) in x.iter().zip(&next).enumerate() {
            if b < a {
                out.decreases += 1;
                out.first_decrease.get_or_insert((step, i + 1, a - b));
            }
        }
        x = next;
        let s = spread(&x);
        if step <= early {
            out.spread_early = out.spread_early.max(s);
        }
        out.spread_all = out.spread_all.max(s);
        if step == k0 {
            at_k0 = x.clone();
        }
    }
    let est = estimate_from(&at_k0, &x, k0, k);
    out.chi_max = est.per_coordinate.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    out
}

#[test]
fn junction_trajectories_from_zero() {
    const SAFETY: f64 = 2.0;
    let (n, m) = (2, 10);
    let (k0, k, early) = (200 * (n + m), 100_000, 1000);
    let gamma = PhaseBoundaries::new(n, m).gamma;
    let started = Instant::now();
    let mut problems = Vec::new();
    for d in density_grid(20) {
        let t = junction_trajectory(n, m, d, k0, k, early);
        if let Some((step, cell, by)) = t.first_decrease {
            problems.push(format!(
                "d={d:.4}: {} decreases, first at step {step} cell {cell} by {by:e}",
                t.decreases
            ));
        }
        if t.spread_all > SAFETY * t.spread_early {
            problems.push(format!("d={d:.4}: spread {} > {SAFETY} x {}", t.spread_all, t.spread_early));
        }
        if t.chi_max > 0.25 + 1e-9 {
            problems.push(format!("d={d:.4}: χ {} above 1/4", t.chi_max));
        }
        if d >= gamma && t.chi_max.abs() > 1e-9 {
            problems.push(format!("d={d:.4} >= γ: χ {} not 0", t.chi_max));
        }
    }
    let elapsed = started.elapsed();
    let pass = problems.is_empty();
    report(
        6,
        "junction trajectories",
        pass,
        &format!("(2,10), 20 densities, 10^5 steps, {:.2?}; {}", elapsed, problems.join("; ")),
    );
    assert!(pass, "{problems:?}");
}

// ---------------------------------------------------------------- 7

#[test]
fn fundamental_diagram_at_five_sixths() {
    let (n, m) = (2, 10);
    let points = diagram_sweep(n, m, &density_grid(101), SimParams::defaults(n, m));
    let mut seen = BTreeSet::new();
    let mut worst = [0.0f64; 4];
    let mut bad = Vec::new();
    for p in &points {
        let chi = p.chi_sim.expect("simulation ran");
        let gap = (chi - p.lambda_exact).abs();
        let tol = if p.phase == Phase::Recession { 0.05 } else { 0.02 };
        let slot = Phase::ALL.iter().position(|&ph| ph == p.phase).unwrap();
        worst[slot] = worst[slot].max(gap);
        seen.insert(p.phase);
        if gap > tol {
            bad.push(format!("d={:.2} {}: χ {chi:.4} λ {:.4}", p.d, p.phase, p.lambda_exact));
        }
    }
    let pass = seen.len() == 4 && bad.is_empty();
    report(
        7,
        "fundamental diagram r=5/6",
        pass,
        &format!(
            "{} points, phases {:?}, worst gap free {:.4} saturation {:.4} recession {:.4} freeze {:.4}",
            points.len(),
            seen.iter().map(|p| p.label()).collect::<Vec<_>>(),
            worst[0],
            worst[1],
            worst[2],
            worst[3]
        ),
    );
    assert!(pass, "{bad:?}");
}

// ---------------------------------------------------------------- 8

#[test]
fn approximation_formula_for_large_junctions() {
    let sizes = [(40, 60), (25, 75), (10, 90), (20, 100), (80, 120), (50, 150), (20, 180), (40, 200)];
    let grid = density_grid(101);
    let mut rows = Vec::new();
    let mut pass = true;
    for (n, m) in sizes {
        let r = m as f64 / (n + m) as f64;
        let gap = grid
            .iter()
            .map(|&d| {
                let cfg = marking_from_density(n, m, d, Placement::Even, 0).unwrap();
                let exact = junction_lambda_exact(&cfg).unwrap().primary;
                (exact - junction_lambda_approx(d, r)).abs()
            })
            .fold(0.0, f64::max);
        let ok = gap <= 0.01;
        pass &= ok;
        rows.push(format!("N={} r={r:.3}: {gap:.4} {}", n + m, verdict(ok)));
    }
    report(8, "approximation formula", pass, &rows.join("; "));
    assert!(pass);
}

// ---------------------------------------------------------------- 9

fn random_homogeneous(rng: &mut ChaCha8Rng) -> HybridMatrix {
    let rows = rng.gen_range(1..=6);
    let cols = rng.gen_range(1..=6);
    let row_kinds = common::kinds(rng, rows);
    let col_kinds = common::kinds(rng, cols);
    // dyadic entries keep every sum exact
    let entries: Vec<Vec<f64>> = row_kinds
        .iter()
        .map(|k| match k {
            RowKind::Standard => {
                let mut v: Vec<f64> = (0..cols).map(|_| rng.gen_range(-8i32..8) as f64 / 4.0).collect();
                let s: f64 = v[..cols - 1].iter().sum();
                v[cols - 1] = 1.0 - s;
                v
            }
            RowKind::MinPlus => (0..cols)
                .map(|_| if rng.gen_bool(0.3) { f64::INFINITY } else { rng.gen_range(-20i32..20) as f64 / 2.0 })
                .collect(),
        })
        .collect();
    HybridMatrix::from_f64_rows(row_kinds, col_kinds, &entries).unwrap()
}

#[test]
fn hybrid_shift_equivariance_and_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    for _ in 0..1000 {
        let m = random_homogeneous(&mut rng);
        assert!(m.is_homogeneous());
        let x: Vec<f64> = (0..m.cols()).map(|_| rng.gen_range(-40i32..40) as f64 / 8.0).collect();
        let lam = rng.gen_range(-40i32..40) as f64 / 4.0;
        let xv = HybridVector::from_f64(m.col_kinds().to_vec(), &x).unwrap();
        let lhs = m.htimes_vec(&xv.shift(lam)).unwrap();
        let rhs = m.htimes_vec(&xv).unwrap().shift(lam);
        if lhs != rhs {
            failures += 1;
        }
    }
    let (w, x) = non_associativity_witness();
    let left = w.htimes_mat(&w).unwrap().htimes_vec(&x).unwrap();
    let right = w.htimes_vec(&w.htimes_vec(&x).unwrap()).unwrap();
    let witness_ok = left != right;
    let pass = failures == 0 && witness_ok;
    let vals = |v: &HybridVector| v.values.iter().map(|x| x.to_f64()).collect::<Vec<_>>();
    report(
        9,
        "hybrid calculus",
        pass,
        &format!(
            "1000 matrices, {failures} shift failures; witness {:?} vs {:?}",
            vals(&left),
            vals(&right)
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 10

#[test]
fn compositions_match_oracle() {
    let rep = common::composition_oracle(10, 100, 100);
    let tol = common::ORACLE_TOL;
    let pass = rep.parallel <= tol && rep.series <= tol && rep.feedback <= tol;
    report(
        10,
        "composition oracle",
        pass,
        &format!(
            "100 systems x 100 steps, max gap parallel {:e} series {:e} feedback {:e}",
            rep.parallel, rep.series, rep.feedback
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 11

fn firings(net: &PetriNet, steps: usize) -> Vec<Vec<f64>> {
    net.simulate(&NetState::zero(net), steps)
        .unwrap()
        .into_iter()
        .map(|s| s.q)
        .collect()
}

#[test]
fn petri_trajectories_satisfy_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nets: Vec<(String, PetriNet)> = Vec::new();
    for m in [3, 5, 10, 17] {
        let bits: Vec<f64> = (0..m).map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 }).collect();
        nets.push((format!("road {m} boolean"), circular_road(&bits)));
        let fluid: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        nets.push((format!("road {m} fluid"), circular_road(&fluid)));
    }
    for (n, m) in [(2, 10), (3, 9), (5, 7), (4, 4)] {
        for d in [0.1, 0.3, 0.5, 0.7, 0.95] {
            for placement in [Placement::Even, Placement::Random] {
                let cfg = marking_from_density(n, m, d, placement, 7).unwrap();
                nets.push((format!("junction ({n},{m}) d={d} {placement}"), junction(n, m, &cfg.a).unwrap()));
            }
        }
    }
    let base = homog_example(0.75);
    let priority = build_priority_resolution(&base, "p", &["q3", "q4"]).unwrap();
    let routing = build_routing_resolution(&base, "p", &[("q3", 0.5), ("q4", 0.5)]).unwrap();
    nets.push(("priority rewrite".into(), priority.clone()));
    nets.push(("routing rewrite".into(), routing));

    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (name, net) in &nets {
        let r = max_residual(&net.constraint_residual(&firings(net, 200)));
        worst = worst.max(r);
        if r > 1e-9 {
            bad.push(format!("{name}: {r:e}"));
        }
    }
    // the rewritten net's trajectory must satisfy the original conflict constraint exactly
    let preserved = max_residual(&base.constraint_residual(&firings(&priority, 200)));
    let pass = bad.is_empty() && preserved == 0.0;
    report(
        11,
        "Petri constraint residual",
        pass,
        &format!(
            "{} nets, max residual {worst:e}; priority rewrite residual on original {preserved:e}",
            nets.len()
        ),
    );
    assert!(pass, "{bad:?}");
}
