use serde::{Deserialize, Serialize};

use super::{MinPlusMatrix, PrecedenceGraph, TropicalError};

/// An optimal cycle of the precedence graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    /// Weight sum divided by edge count of `nodes`.
    pub mean_weight: f64,
    /// Node sequence `v0 → v1 → … → v0`, rotated to start at its smallest node.
    pub nodes: Vec<usize>,
    pub weight: f64,
}

impl CycleStats {
    pub fn length(&self) -> usize {
        self.nodes.len()
    }
}

/// Sum of edge weights along a closed node sequence.
pub fn cycle_weight(graph: &PrecedenceGraph, nodes: &[usize]) -> Option<f64> {
    let l = nodes.len();
    (0..l)
        .map(|t| graph.edge_weight(nodes[t], nodes[(t + 1) % l]))
        .sum()
}

/// Karp's characterisation: `λ = min_v max_k (D_n(v) − D_k(v)) / (n − k)`,
/// where `D_k(v)` is the lightest length-`k` walk from node 0 to `v`.
pub fn karp_value(graph: &PrecedenceGraph) -> f64 {
    let n = graph.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n + 1];
    d[0][0] = 0.0;
    for k in 0..n {
        for u in 0..n {
            let du = d[k][u];
            if du == f64::INFINITY {
                continue;
            }
            for &(v, w) in graph.successors(u) {
                if du + w < d[k + 1][v] {
                    d[k + 1][v] = du + w;
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    for v in 0..n {
        if d[n][v] == f64::INFINITY {
            continue;
        }
        let worst = (0..n)
            .filter(|&k| d[k][v] < f64::INFINITY)
            .map(|k| (d[n][v] - d[k][v]) / (n - k) as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        best = best.min(worst);
    }
    best
}

pub(crate) fn tolerance(a: &MinPlusMatrix, lambda: f64) -> f64 {
    let scale = (0..a.rows())
        .flat_map(|i| a.row(i).iter().filter_map(|x| x.finite()))
        .fold(lambda.abs().max(1.0), |m, x| m.max(x.abs()));
    1e-9 * scale * a.rows().max(1) as f64
}

/// All-pairs lightest path weights (paths of length ≥ 1) in the graph of
/// `A − λ`. `dist[u][v]` is the lightest `u → v` path.
pub(crate) fn normalized_closure(graph: &PrecedenceGraph, lambda: f64) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (u, v, w) in graph.edges() {
        dist[u][v] = dist[u][v].min(w - lambda);
    }
    for k in 0..n {
        for u in 0..n {
            let duk = dist[u][k];
            if duk == f64::INFINITY {
                continue;
            }
            for v in 0..n {
                let cand = duk + dist[k][v];
                if cand < dist[u][v] {
                    dist[u][v] = cand;
                }
            }
        }
    }
    dist
}

/// Lexicographically smallest simple cycle in the subgraph given by `allowed`
/// (`allowed[u]` sorted ascending). Cycles are compared after rotation to
/// their smallest node.
fn lexicographic_cycle(n: usize, allowed: &[Vec<usize>]) -> Option<Vec<usize>> {
    // is `target` reachable from `from` through nodes >= floor that are not blocked?
    let reaches = |from: usize, target: usize, floor: usize, blocked: &[bool]| -> bool {
        let mut seen = blocked.to_vec();
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &v in allowed[u].iter().filter(|&&v| v >= floor) {
                if v == target {
                    return true;
                }
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    };
    for start in 0..n {
        if !reaches(start, start, start, &vec![false; n]) {
            continue;
        }
        let mut path = vec![start];
        let mut visited = vec![false; n];
        visited[start] = true;
        let mut u = start;
        loop {
            if allowed[u].contains(&start) {
                return Some(path);
            }
            let v = allowed[u].iter().copied().find(|&v| {
                v > start && !visited[v] && {
                    let mut blocked = visited.clone();
                    blocked[start] = false;
                    blocked[v] = true;
                    reaches(v, start, start, &blocked)
                }
            })?;
            visited[v] = true;
            path.push(v);
            u = v;
        }
    }
    None
}

/// Minimum cycle mean of the precedence graph of `a`, with a witness cycle.
///
/// The value comes from Karp's recursion; the witness is the lexicographically
/// smallest simple cycle of the critical graph (edges lying on a cycle of mean
/// `λ` in `A − λ`).
pub fn min_mean_cycle(a: &MinPlusMatrix) -> Result<CycleStats, TropicalError> {
    let graph = PrecedenceGraph::from_matrix(a)?;
    graph.check_strongly_connected()?;
    let lambda = karp_value(&graph);
    let tol = tolerance(a, lambda);
    let dist = normalized_closure(&graph, lambda);
    let n = graph.node_count();
    let mut critical = vec![Vec::new(); n];
    for (u, v, w) in graph.edges() {
        if (w - lambda + dist[v][u]).abs() <= tol {
            critical[u].push(v);
        }
    }
    let nodes = lexicographic_cycle(n, &critical).ok_or(TropicalError::Internal(
        "critical graph has no cycle",
    ))?;
    let weight = cycle_weight(&graph, &nodes).ok_or(TropicalError::Internal(
        "witness cycle uses a missing edge",
    ))?;
    let mean_weight = weight / nodes.len() as f64;
    if (mean_weight - lambda).abs() > tol {
        return Err(TropicalError::Internal("witness mean disagrees with Karp value"));
    }
    Ok(CycleStats {
        mean_weight,
        nodes,
        weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    const INF: f64 = f64::INFINITY;

    fn m(rows: &[Vec<f64>]) -> MinPlusMatrix {
        MinPlusMatrix::from_f64_rows(rows).unwrap()
    }

    #[test]
    fn self_loop() {
        let c = min_mean_cycle(&m(&[vec![5.0]])).unwrap();
        assert_eq!(c.mean_weight, 5.0);
        assert_eq!(c.nodes, vec![0]);
    }

    #[test]
    fn two_cycle() {
        let c = min_mean_cycle(&m(&[vec![INF, 3.0], vec![1.0, INF]])).unwrap();
        assert_eq!(c.mean_weight, 2.0);
        assert_eq!(c.nodes, vec![0, 1]);
        assert_eq!(c.weight, 4.0);
    }

    #[test]
    fn ties_pick_smallest_sequence() {
        // two disjoint optimal loops: 1 -> 1 and 2 -> 2 (mean 0), plus heavier 0
        let a = m(&[
            vec![3.0, 1.0, INF],
            vec![1.0, 0.0, 5.0],
            vec![INF, 5.0, 0.0],
        ]);
        let c = min_mean_cycle(&a).unwrap();
        assert_eq!(c.mean_weight, 0.0);
        assert_eq!(c.nodes, vec![1]);
    }

    #[test]
    fn not_strongly_connected() {
        let a = m(&[vec![0.0, INF], vec![1.0, 0.0]]);
        assert!(matches!(
            min_mean_cycle(&a),
            Err(TropicalError::NotStronglyConnected { .. })
        ));
    }

    #[test]
    fn shift_moves_lambda() {
        let a = m(&[vec![INF, 3.0, 1.0], vec![1.0, INF, 4.0], vec![2.0, 2.0, 7.0]]);
        let l0 = min_mean_cycle(&a).unwrap().mean_weight;
        let l1 = min_mean_cycle(&a.shift_finite(2.5)).unwrap().mean_weight;
        assert!((l1 - l0 - 2.5).abs() < 1e-12);
    }
}
