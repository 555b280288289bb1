use super::{MinPlusMatrix, TropicalError};

/// Weighted directed graph of a square minplus matrix: edge `i → j` iff
/// `A[j][i] ≠ ε`, with weight `A[j][i]`.
#[derive(Debug, Clone)]
pub struct PrecedenceGraph {
    nodes: usize,
    /// `out[i]` lists `(j, weight)` for every edge `i → j`, sorted by `j`.
    out: Vec<Vec<(usize, f64)>>,
}

impl PrecedenceGraph {
    pub fn from_matrix(a: &MinPlusMatrix) -> Result<Self, TropicalError> {
        if !a.is_square() {
            return Err(TropicalError::NotSquare(a.rows(), a.cols()));
        }
        let n = a.rows();
        let mut out = vec![Vec::new(); n];
        for (i, edges) in out.iter_mut().enumerate() {
            for j in 0..n {
                let w = a.get(j, i);
                if w.is_eps() {
                    continue;
                }
                let w = w.finite().ok_or(TropicalError::NegInfEdge { from: i, to: j })?;
                edges.push((j, w));
            }
        }
        Ok(Self { nodes: n, out })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.iter().map(move |&(j, w)| (i, j, w)))
    }

    pub fn successors(&self, i: usize) -> &[(usize, f64)] {
        &self.out[i]
    }

    pub fn edge_weight(&self, from: usize, to: usize) -> Option<f64> {
        self.out[from]
            .iter()
            .find(|(j, _)| *j == to)
            .map(|&(_, w)| w)
    }

    fn reachable(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![start];
        seen[start] = true;
        let reverse = (!forward).then(|| {
            let mut inc = vec![Vec::new(); self.nodes];
            for (i, j, _) in self.edges() {
                inc[j].push(i);
            }
            inc
        });
        while let Some(u) = stack.pop() {
            let next: Vec<usize> = match &reverse {
                None => self.out[u].iter().map(|&(v, _)| v).collect(),
                Some(inc) => inc[u].clone(),
            };
            for v in next {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Checks strong connectivity; on failure names a pair `(i, j)` such that
    /// `j` is not reachable from `i`.
    pub fn check_strongly_connected(&self) -> Result<(), TropicalError> {
        if self.nodes == 0 {
            return Err(TropicalError::Empty);
        }
        let fwd = self.reachable(0, true);
        if let Some(j) = fwd.iter().position(|r| !r) {
            return Err(TropicalError::NotStronglyConnected { from: 0, to: j });
        }
        let bwd = self.reachable(0, false);
        if let Some(i) = bwd.iter().position(|r| !r) {
            return Err(TropicalError::NotStronglyConnected { from: i, to: 0 });
        }
        Ok(())
    }
}
