use serde::Serialize;

use super::ComposeError;
use crate::hybrid::{HybridMatrix, RowKind};
use crate::scalar::ExtendedReal;

/// `X^{k+1} = A ⊠ X^k ⊞ B ⊠ U^k`, `Y^{k+1} = C ⊠ X^k`, written as the single
/// product `[[A, B], [C, ε]] ⊠ [X^k; U^k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDyn {
    a: HybridMatrix,
    b: HybridMatrix,
    c: HybridMatrix,
    x0: Vec<ExtendedReal>,
}

/// How the stored output `Y^0` of a series or feedback composite is set.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialOutput {
    /// `Y^0 = C ⊠ X^0`.
    #[default]
    FromState,
    Explicit(Vec<ExtendedReal>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemTrace {
    /// `X^0 … X^K`.
    pub states: Vec<Vec<ExtendedReal>>,
    /// `outputs[k] = Y^{k+1} = C ⊠ X^k`.
    pub outputs: Vec<Vec<ExtendedReal>>,
}

fn mismatch(what: &str, left: &[RowKind], right: &[RowKind]) -> ComposeError {
    ComposeError::Signature(format!("{what}: {} vs {}", tokens(left), tokens(right)))
}

pub(crate) fn tokens(kinds: &[RowKind]) -> String {
    kinds.iter().map(|k| k.token()).collect::<Vec<_>>().join(" ")
}

/// Null matrix with the given blocks copied in at `(row, col)` offsets.
fn assemble(row_kinds: Vec<RowKind>, col_kinds: Vec<RowKind>, blocks: &[(usize, usize, &HybridMatrix)]) -> HybridMatrix {
    let mut out = HybridMatrix::null(row_kinds, col_kinds);
    for &(r0, c0, m) in blocks {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(r0 + i, c0 + j, m.get(i, j));
            }
        }
    }
    out
}

fn concat<T: Clone>(parts: &[&[T]]) -> Vec<T> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

impl SystemDyn {
    pub fn new(a: HybridMatrix, b: HybridMatrix, c: HybridMatrix) -> Result<Self, ComposeError> {
        let x0 = a.row_kinds().iter().map(|_| ExtendedReal::Finite(0.0)).collect();
        Self::with_initial(a, b, c, x0)
    }

    pub fn with_initial(
        a: HybridMatrix,
        b: HybridMatrix,
        c: HybridMatrix,
        x0: Vec<ExtendedReal>,
    ) -> Result<Self, ComposeError> {
        let states = a.row_kinds();
        if a.col_kinds() != states {
            return Err(mismatch("A columns differ from A rows", a.col_kinds(), states));
        }
        if b.row_kinds() != states {
            return Err(mismatch("B rows differ from state kinds", b.row_kinds(), states));
        }
        if c.col_kinds() != states {
            return Err(mismatch("C columns differ from state kinds", c.col_kinds(), states));
        }
        if x0.len() != states.len() {
            return Err(ComposeError::Dimension {
                what: "initial state",
                expected: states.len(),
                found: x0.len(),
            });
        }
        Ok(Self { a, b, c, x0 })
    }

    /// No states; every output is the null of its kind.
    pub fn null(inputs: Vec<RowKind>, outputs: Vec<RowKind>) -> Self {
        Self {
            a: HybridMatrix::null(vec![], vec![]),
            b: HybridMatrix::null(vec![], inputs),
            c: HybridMatrix::null(outputs, vec![]),
            x0: vec![],
        }
    }

    /// One minplus state per signal: `x^{k+1} = u^k`, `y^{k+1} = x^k`.
    pub fn delay(n: usize) -> Self {
        let kinds = vec![RowKind::MinPlus; n];
        let mut id = HybridMatrix::null(kinds.clone(), kinds.clone());
        for i in 0..n {
            id.set(i, i, ExtendedReal::Finite(0.0));
        }
        Self {
            a: HybridMatrix::null(kinds.clone(), kinds),
            b: id.clone(),
            c: id,
            x0: vec![ExtendedReal::Finite(0.0); n],
        }
    }

    pub fn a(&self) -> &HybridMatrix {
        &self.a
    }

    pub fn b(&self) -> &HybridMatrix {
        &self.b
    }

    pub fn c(&self) -> &HybridMatrix {
        &self.c
    }

    pub fn x0(&self) -> &[ExtendedReal] {
        &self.x0
    }

    pub fn set_x0(&mut self, x0: Vec<ExtendedReal>) -> Result<(), ComposeError> {
        if x0.len() != self.state_count() {
            return Err(ComposeError::Dimension {
                what: "initial state",
                expected: self.state_count(),
                found: x0.len(),
            });
        }
        self.x0 = x0;
        Ok(())
    }

    pub fn state_kinds(&self) -> &[RowKind] {
        self.a.row_kinds()
    }

    pub fn input_kinds(&self) -> &[RowKind] {
        self.b.col_kinds()
    }

    pub fn output_kinds(&self) -> &[RowKind] {
        self.c.row_kinds()
    }

    pub fn state_count(&self) -> usize {
        self.a.rows()
    }

    /// `[[A, B], [C, ε]]`, rows `[X; Y]`, columns `[X; U]`.
    pub fn block(&self) -> HybridMatrix {
        let n = self.state_count();
        assemble(
            concat(&[self.state_kinds(), self.output_kinds()]),
            concat(&[self.state_kinds(), self.input_kinds()]),
            &[(0, 0, &self.a), (0, n, &self.b), (n, 0, &self.c)],
        )
    }

    /// Homogeneity of the block matrix.
    pub fn is_homogeneous(&self) -> bool {
        self.block().is_homogeneous()
    }

    /// `C ⊠ X^0`.
    pub fn initial_output(&self) -> Vec<ExtendedReal> {
        self.c.apply_values(&self.x0)
    }

    fn resolve_initial(&self, init: &InitialOutput) -> Result<Vec<ExtendedReal>, ComposeError> {
        match init {
            InitialOutput::FromState => Ok(self.initial_output()),
            InitialOutput::Explicit(y) if y.len() == self.output_kinds().len() => Ok(y.clone()),
            InitialOutput::Explicit(y) => Err(ComposeError::Dimension {
                what: "initial output",
                expected: self.output_kinds().len(),
                found: y.len(),
            }),
        }
    }

    /// `S1 ⊞ S2`: same inputs, outputs added per output kind.
    pub fn parallel(s1: &Self, s2: &Self) -> Result<Self, ComposeError> {
        if s1.input_kinds() != s2.input_kinds() {
            return Err(mismatch("parallel inputs", s1.input_kinds(), s2.input_kinds()));
        }
        if s1.output_kinds() != s2.output_kinds() {
            return Err(mismatch("parallel outputs", s1.output_kinds(), s2.output_kinds()));
        }
        let n1 = s1.state_count();
        let states = concat(&[s1.state_kinds(), s2.state_kinds()]);
        let a = assemble(states.clone(), states.clone(), &[(0, 0, &s1.a), (n1, n1, &s2.a)]);
        let b = assemble(states.clone(), s1.input_kinds().to_vec(), &[(0, 0, &s1.b), (n1, 0, &s2.b)]);
        let c = assemble(s1.output_kinds().to_vec(), states, &[(0, 0, &s1.c), (0, n1, &s2.c)]);
        Self::with_initial(a, b, c, concat(&[&s1.x0, &s2.x0]))
    }

    pub fn series(s1: &Self, s2: &Self) -> Result<Self, ComposeError> {
        Self::series_with(s1, s2, &InitialOutput::FromState)
    }

    /// `S1 ⊠ S2`, i.e. `S1(S2(U))`, with state `[X1; X2; Y2]`.
    pub fn series_with(s1: &Self, s2: &Self, init: &InitialOutput) -> Result<Self, ComposeError> {
        if s2.output_kinds() != s1.input_kinds() {
            return Err(mismatch("series S2 outputs vs S1 inputs", s2.output_kinds(), s1.input_kinds()));
        }
        let (n1, n2) = (s1.state_count(), s2.state_count());
        let states = concat(&[s1.state_kinds(), s2.state_kinds(), s2.output_kinds()]);
        let a = assemble(
            states.clone(),
            states.clone(),
            &[(0, 0, &s1.a), (0, n1 + n2, &s1.b), (n1, n1, &s2.a), (n1 + n2, n1, &s2.c)],
        );
        let b = assemble(states.clone(), s2.input_kinds().to_vec(), &[(n1, 0, &s2.b)]);
        let c = assemble(s1.output_kinds().to_vec(), states, &[(0, 0, &s1.c)]);
        let y2 = s2.resolve_initial(init)?;
        Self::with_initial(a, b, c, concat(&[&s1.x0, &s2.x0, &y2]))
    }

    pub fn feedback(s: &Self) -> Result<Self, ComposeError> {
        Self::feedback_with(s, &InitialOutput::FromState)
    }

    /// `S^⊡`, the solution in `Y` of `Y = S(U ⊞ Y)`, with state `[X; Y]`.
    pub fn feedback_with(s: &Self, init: &InitialOutput) -> Result<Self, ComposeError> {
        if s.output_kinds() != s.input_kinds() {
            return Err(mismatch("feedback outputs vs inputs", s.output_kinds(), s.input_kinds()));
        }
        let n = s.state_count();
        let states = concat(&[s.state_kinds(), s.output_kinds()]);
        let a = assemble(states.clone(), states.clone(), &[(0, 0, &s.a), (0, n, &s.b), (n, 0, &s.c)]);
        let b = assemble(states.clone(), s.input_kinds().to_vec(), &[(0, 0, &s.b)]);
        let c = assemble(s.output_kinds().to_vec(), states, &[(0, 0, &s.c)]);
        let y = s.resolve_initial(init)?;
        Self::with_initial(a, b, c, concat(&[&s.x0, &y]))
    }

    /// One step from `(X^k, U^k)` to `(X^{k+1}, Y^{k+1})`.
    pub fn step(&self, x: &[ExtendedReal], u: &[ExtendedReal]) -> Result<(Vec<ExtendedReal>, Vec<ExtendedReal>), ComposeError> {
        self.step_block(&self.block(), x, u)
    }

    fn step_block(
        &self,
        block: &HybridMatrix,
        x: &[ExtendedReal],
        u: &[ExtendedReal],
    ) -> Result<(Vec<ExtendedReal>, Vec<ExtendedReal>), ComposeError> {
        if x.len() != self.state_count() {
            return Err(ComposeError::Dimension {
                what: "state",
                expected: self.state_count(),
                found: x.len(),
            });
        }
        if u.len() != self.input_kinds().len() {
            return Err(ComposeError::Dimension {
                what: "input",
                expected: self.input_kinds().len(),
                found: u.len(),
            });
        }
        let mut out = block.apply_values(&concat(&[x, u]));
        let y = out.split_off(self.state_count());
        Ok((out, y))
    }

    /// Runs from `x0` on the input stream `U^0 … U^{K−1}`.
    pub fn simulate(&self, inputs: &[Vec<ExtendedReal>]) -> Result<SystemTrace, ComposeError> {
        let block = self.block();
        let mut states = Vec::with_capacity(inputs.len() + 1);
        let mut outputs = Vec::with_capacity(inputs.len());
        states.push(self.x0.clone());
        for u in inputs {
            let (x, y) = self.step_block(&block, states.last().expect("non-empty"), u)?;
            states.push(x);
            outputs.push(y);
        }
        Ok(SystemTrace { states, outputs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::growth_rate;
    use crate::scalar::{Finite, EPS};
    use crate::traffic::road_event_graph;

    fn fin(v: &[f64]) -> Vec<ExtendedReal> {
        v.iter().map(|&x| Finite(x)).collect()
    }

    fn mp(rows: &[Vec<f64>], r: usize, c: usize) -> HybridMatrix {
        HybridMatrix::from_f64_rows(vec![RowKind::MinPlus; r], vec![RowKind::MinPlus; c], rows).unwrap()
    }

    /// `x' = min(1 + x, 2 + u)`, `y' = x`.
    fn small() -> SystemDyn {
        SystemDyn::new(mp(&[vec![1.0]], 1, 1), mp(&[vec![2.0]], 1, 1), mp(&[vec![0.0]], 1, 1)).unwrap()
    }

    fn stream(k: usize) -> Vec<Vec<ExtendedReal>> {
        (0..k).map(|i| vec![Finite(((i * 7) % 5) as f64)]).collect()
    }

    #[test]
    fn block_layout() {
        let s = small();
        let b = s.block();
        assert_eq!(b.rows(), 2);
        assert_eq!(b.get(1, 1), EPS);
        let (x, y) = s.step(&fin(&[3.0]), &fin(&[0.0])).unwrap();
        assert_eq!((x, y), (fin(&[2.0]), fin(&[3.0])));
    }

    #[test]
    fn parallel_with_null_and_itself() {
        let s = small();
        let null = SystemDyn::null(vec![RowKind::MinPlus], vec![RowKind::MinPlus]);
        let u = stream(30);
        let base = s.simulate(&u).unwrap().outputs;
        assert_eq!(SystemDyn::parallel(&s, &null).unwrap().simulate(&u).unwrap().outputs, base);
        assert_eq!(SystemDyn::parallel(&s, &s).unwrap().simulate(&u).unwrap().outputs, base);
    }

    #[test]
    fn parallel_standard_outputs_add() {
        let k = vec![RowKind::Standard];
        let s = SystemDyn::new(
            HybridMatrix::from_f64_rows(k.clone(), k.clone(), &[vec![0.5]]).unwrap(),
            HybridMatrix::from_f64_rows(k.clone(), k.clone(), &[vec![0.5]]).unwrap(),
            HybridMatrix::from_f64_rows(k.clone(), k.clone(), &[vec![1.0]]).unwrap(),
        )
        .unwrap();
        assert!(s.is_homogeneous());
        let p = SystemDyn::parallel(&s, &s).unwrap();
        let u = stream(10);
        let single = s.simulate(&u).unwrap().outputs;
        let both = p.simulate(&u).unwrap().outputs;
        for (a, b) in single.iter().zip(&both) {
            assert_eq!(b[0], a[0].add(a[0]));
        }
        // output row sums to 2
        assert!(!p.is_homogeneous());
    }

    #[test]
    fn series_with_delay_lags_by_two() {
        let s = small();
        let chained = SystemDyn::series(&SystemDyn::delay(1), &s).unwrap();
        let u = stream(40);
        let direct = s.simulate(&u).unwrap().outputs;
        let out = chained.simulate(&u).unwrap().outputs;
        for k in 2..40 {
            assert_eq!(out[k], direct[k - 2]);
        }
    }

    #[test]
    fn series_after_null_is_constant() {
        let delay = SystemDyn::delay(1);
        let null = SystemDyn::null(vec![RowKind::MinPlus], vec![RowKind::MinPlus]);
        let out = SystemDyn::series(&delay, &null).unwrap().simulate(&stream(10)).unwrap().outputs;
        assert!(out[2..].iter().all(|y| y == &vec![EPS]));
    }

    #[test]
    fn pure_delay_feedback_expansion() {
        // x' = a + u, y' = x, so the loop gives y^{k+2} = a + min(u^k, y^k)
        let a = 0.75;
        let s = SystemDyn::new(mp(&[vec![f64::INFINITY]], 1, 1), mp(&[vec![a]], 1, 1), mp(&[vec![0.0]], 1, 1)).unwrap();
        let fb = SystemDyn::feedback(&s).unwrap();
        let u = stream(50);
        let tr = fb.simulate(&u).unwrap();
        let y: Vec<ExtendedReal> = tr.states.iter().map(|x| x[1]).collect();
        for k in 0..48 {
            assert_eq!(y[k + 2], Finite(a).otimes(u[k][0].oplus(y[k])));
        }
    }

    #[test]
    fn feedback_with_eps_input_is_nondecreasing() {
        let s = SystemDyn::new(
            mp(&[vec![0.5, 2.0], vec![1.0, f64::INFINITY]], 2, 2),
            mp(&[vec![0.25], vec![f64::INFINITY]], 2, 1),
            mp(&[vec![0.0, 1.0]], 1, 2),
        )
        .unwrap();
        let fb = SystemDyn::feedback(&s).unwrap();
        let tr = fb.simulate(&vec![vec![EPS]; 60]).unwrap();
        for w in tr.outputs.windows(2) {
            assert!(w[1][0] >= w[0][0]);
        }
    }

    #[test]
    fn explicit_initial_output() {
        let s = small();
        let fb = SystemDyn::feedback_with(&s, &InitialOutput::Explicit(fin(&[7.0]))).unwrap();
        assert_eq!(fb.x0(), fin(&[0.0, 7.0]).as_slice());
        assert!(SystemDyn::feedback_with(&s, &InitialOutput::Explicit(vec![])).is_err());
    }

    /// Open road `q_2 … q_m` with input and output `q_1`.
    fn open_road(a: &[f64]) -> SystemDyn {
        let m = a.len();
        let g = road_event_graph(a);
        let n = m - 1;
        let get = |i: usize, j: usize| g[(i, j)].to_f64();
        let rows_a: Vec<Vec<f64>> = (1..m).map(|i| (1..m).map(|j| get(i, j)).collect()).collect();
        let rows_b: Vec<Vec<f64>> = (1..m).map(|i| vec![get(i, 0)]).collect();
        let rows_c = vec![(1..m).map(|j| get(0, j)).collect::<Vec<f64>>()];
        SystemDyn::new(mp(&rows_a, n, n), mp(&rows_b, n, 1), mp(&rows_c, 1, n)).unwrap()
    }

    #[test]
    fn road_closed_by_feedback() {
        for a in [vec![1.0, 0.0, 1.0, 0.0, 0.0], vec![1.0, 1.0, 1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]] {
            let m = a.len();
            let rho = a.iter().sum::<f64>() / m as f64;
            let fb = SystemDyn::feedback(&open_road(&a)).unwrap();
            let g = growth_rate(fb.a(), &vec![0.0; m], 10 * m, 200 * m).unwrap();
            assert!((g.chi - rho.min(1.0 - rho)).abs() < 1e-9, "{a:?}: {}", g.chi);
            // the closed loop is the ring with q_1 moved last
            let ring = road_event_graph(&a);
            let perm = |i: usize| (i + 1) % m;
            for i in 0..m {
                for j in 0..m {
                    assert_eq!(fb.a().get(i, j), ring[(perm(i), perm(j))]);
                }
            }
        }
    }

    #[test]
    fn signature_mismatch() {
        let s = small();
        let std1 = SystemDyn::null(vec![RowKind::Standard], vec![RowKind::MinPlus]);
        assert!(matches!(SystemDyn::parallel(&s, &std1), Err(ComposeError::Signature(_))));
        assert!(matches!(SystemDyn::series(&std1, &s), Err(ComposeError::Signature(_))));
        assert!(matches!(SystemDyn::feedback(&std1), Err(ComposeError::Signature(_))));
        assert!(s.step(&[], &fin(&[0.0])).is_err());
    }
}
