//! Hybrid matrices whose rows are either standard linear forms or minplus
//! linear forms, with the operations `⊞` and `⊠`.
//!
//! Each row and column carries its own [`RowKind`], so permuted layouts (state
//! blocks interleaved with input blocks) need no reordering. A standard row
//! evaluates `Σ_j M_ij x_j` with the extended-real conventions, a minplus row
//! evaluates `min_j (M_ij + x_j)`. Absent entries are the null element of the
//! row: `0` for standard rows, `ε` for minplus rows.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{ExtendedReal, Finite, EPS};
use crate::tropical::MinPlusMatrix;

/// Tolerance on standard row sums when testing homogeneity.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowKind {
    /// `+` node: weighted sums.
    Standard,
    /// `⊕` node: min of shifted entries.
    MinPlus,
}

impl RowKind {
    pub fn null(self) -> ExtendedReal {
        match self {
            RowKind::Standard => Finite(0.0),
            RowKind::MinPlus => EPS,
        }
    }

    /// `⊞` of two scalars in a row of this kind.
    pub fn plus(self, a: ExtendedReal, b: ExtendedReal) -> ExtendedReal {
        match self {
            RowKind::Standard => a.add(b),
            RowKind::MinPlus => a.oplus(b),
        }
    }

    /// Product of a coefficient with an operand in a row of this kind.
    pub fn times(self, coef: ExtendedReal, x: ExtendedReal) -> ExtendedReal {
        match self {
            RowKind::Standard => coef.mul(x),
            RowKind::MinPlus => coef.otimes(x),
        }
    }

    pub(crate) fn token(self) -> &'static str {
        match self {
            RowKind::Standard => "s",
            RowKind::MinPlus => "p",
        }
    }

    pub(crate) fn parse(tok: &str) -> Option<Self> {
        match tok {
            "s" | "S" => Some(RowKind::Standard),
            "p" | "P" | "m" => Some(RowKind::MinPlus),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HybridError {
    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A vector together with the kind of each coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridVector {
    pub kinds: Vec<RowKind>,
    pub values: Vec<ExtendedReal>,
}

impl HybridVector {
    pub fn new(kinds: Vec<RowKind>, values: Vec<ExtendedReal>) -> Result<Self, HybridError> {
        if kinds.len() != values.len() {
            return Err(HybridError::DimensionMismatch {
                expected: kinds.len(),
                found: values.len(),
            });
        }
        Ok(Self { kinds, values })
    }

    pub fn from_f64(kinds: Vec<RowKind>, values: &[f64]) -> Result<Self, HybridError> {
        Self::new(kinds, values.iter().map(|&x| ExtendedReal::from(x)).collect())
    }

    /// `λ ⊗ x`: adds `λ` to every coordinate.
    pub fn shift(&self, lambda: f64) -> Self {
        Self {
            kinds: self.kinds.clone(),
            values: self.values.iter().map(|x| x.otimes(Finite(lambda))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridMatrix {
    row_kinds: Vec<RowKind>,
    col_kinds: Vec<RowKind>,
    data: Vec<ExtendedReal>,
}

impl HybridMatrix {
    /// Matrix of null entries (`0` in standard rows, `ε` in minplus rows);
    /// the neutral element of `⊞`.
    pub fn null(row_kinds: Vec<RowKind>, col_kinds: Vec<RowKind>) -> Self {
        let cols = col_kinds.len();
        let data = row_kinds
            .iter()
            .flat_map(|k| std::iter::repeat(k.null()).take(cols))
            .collect();
        Self {
            row_kinds,
            col_kinds,
            data,
        }
    }

    pub fn from_rows(
        row_kinds: Vec<RowKind>,
        col_kinds: Vec<RowKind>,
        rows: Vec<Vec<ExtendedReal>>,
    ) -> Result<Self, HybridError> {
        if rows.len() != row_kinds.len() {
            return Err(HybridError::DimensionMismatch {
                expected: row_kinds.len(),
                found: rows.len(),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != col_kinds.len()) {
            return Err(HybridError::DimensionMismatch {
                expected: col_kinds.len(),
                found: r.len(),
            });
        }
        Ok(Self {
            row_kinds,
            col_kinds,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_f64_rows(
        row_kinds: Vec<RowKind>,
        col_kinds: Vec<RowKind>,
        rows: &[Vec<f64>],
    ) -> Result<Self, HybridError> {
        Self::from_rows(
            row_kinds,
            col_kinds,
            rows.iter()
                .map(|r| r.iter().map(|&x| ExtendedReal::from(x)).collect())
                .collect(),
        )
    }

    /// All-minplus view of a [`MinPlusMatrix`].
    pub fn from_minplus(a: &MinPlusMatrix) -> Self {
        Self {
            row_kinds: vec![RowKind::MinPlus; a.rows()],
            col_kinds: vec![RowKind::MinPlus; a.cols()],
            data: (0..a.rows()).flat_map(|i| a.row(i).to_vec()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.row_kinds.len()
    }

    pub fn cols(&self) -> usize {
        self.col_kinds.len()
    }

    pub fn row_kinds(&self) -> &[RowKind] {
        &self.row_kinds
    }

    pub fn col_kinds(&self) -> &[RowKind] {
        &self.col_kinds
    }

    pub fn row(&self, i: usize) -> &[ExtendedReal] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn get(&self, i: usize, j: usize) -> ExtendedReal {
        self.data[i * self.cols() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExtendedReal) {
        let c = self.cols();
        self.data[i * c + j] = v;
    }

    /// `M1 ⊞ M2`: `+` on standard rows, `⊕` on minplus rows.
    pub fn hplus(&self, other: &Self) -> Result<Self, HybridError> {
        if self.row_kinds != other.row_kinds || self.col_kinds != other.col_kinds {
            return Err(HybridError::PartitionMismatch(
                "⊞ needs identical row and column kinds".into(),
            ));
        }
        let c = self.cols();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .enumerate()
            .map(|(idx, (a, b))| self.row_kinds[idx / c.max(1)].plus(*a, *b))
            .collect();
        Ok(Self {
            row_kinds: self.row_kinds.clone(),
            col_kinds: self.col_kinds.clone(),
            data,
        })
    }

    fn row_dot(&self, i: usize, column: impl Iterator<Item = ExtendedReal>) -> ExtendedReal {
        let kind = self.row_kinds[i];
        self.row(i)
            .iter()
            .zip(column)
            .fold(kind.null(), |acc, (m, x)| kind.plus(acc, kind.times(*m, x)))
    }

    /// `M ⊠ x`.
    pub fn htimes_vec(&self, x: &HybridVector) -> Result<HybridVector, HybridError> {
        if x.len() != self.cols() {
            return Err(HybridError::DimensionMismatch {
                expected: self.cols(),
                found: x.len(),
            });
        }
        if x.kinds != self.col_kinds {
            return Err(HybridError::PartitionMismatch(
                "vector kinds differ from column kinds".into(),
            ));
        }
        Ok(HybridVector {
            kinds: self.row_kinds.clone(),
            values: (0..self.rows())
                .map(|i| self.row_dot(i, x.values.iter().copied()))
                .collect(),
        })
    }

    /// `M ⊠ x` on raw values, without checking the operand's kinds.
    pub fn apply_values(&self, x: &[ExtendedReal]) -> Vec<ExtendedReal> {
        (0..self.rows()).map(|i| self.row_dot(i, x.iter().copied())).collect()
    }

    /// `M1 ⊠ M2`, the block formula `[AA'+BC', AB'+BD'; C⊗A'⊕D⊗C', C⊗B'⊕D⊗D']`
    /// in a layout-free form: each result row uses the kind of the left row.
    pub fn htimes_mat(&self, other: &Self) -> Result<Self, HybridError> {
        if self.col_kinds != other.row_kinds {
            return Err(HybridError::PartitionMismatch(
                "left column kinds differ from right row kinds".into(),
            ));
        }
        let mut out = Self::null(self.row_kinds.clone(), other.col_kinds.clone());
        for i in 0..self.rows() {
            for k in 0..other.cols() {
                let v = self.row_dot(i, (0..other.rows()).map(|j| other.get(j, k)));
                out.set(i, k, v);
            }
        }
        Ok(out)
    }

    /// Every standard row's finite coefficients sum to 1 (within
    /// [`ROW_SUM_TOL`]). Minplus rows are always homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        (0..self.rows())
            .filter(|&i| self.row_kinds[i] == RowKind::Standard)
            .all(|i| {
                let s: f64 = self.row(i).iter().filter_map(|x| x.finite()).sum();
                (s - 1.0).abs() <= ROW_SUM_TOL
            })
    }

    /// All finite standard coefficients are nonnegative.
    pub fn is_monotone(&self) -> bool {
        (0..self.rows())
            .filter(|&i| self.row_kinds[i] == RowKind::Standard)
            .all(|i| self.row(i).iter().filter_map(|x| x.finite()).all(|x| x >= 0.0))
    }

    /// Parses `rows: s p …` / `cols: …` headers followed by the entry grid.
    pub fn parse_text(text: &str) -> Result<Self, HybridError> {
        let mut row_kinds = None;
        let mut col_kinds = None;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| HybridError::Parse { line: n + 1, msg };
            if let Some((key, rest)) = line.split_once(':') {
                let kinds = rest
                    .split_whitespace()
                    .map(|t| RowKind::parse(t).ok_or_else(|| perr(format!("bad kind `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                match key.trim() {
                    "rows" => row_kinds = Some(kinds),
                    "cols" => col_kinds = Some(kinds),
                    other => return Err(perr(format!("unknown header `{other}`"))),
                }
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<ExtendedReal>().map_err(|e| perr(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let row_kinds = row_kinds.ok_or(HybridError::Parse {
            line: 0,
            msg: "missing `rows:` header".into(),
        })?;
        let col_kinds = col_kinds.unwrap_or_else(|| row_kinds.clone());
        Self::from_rows(row_kinds, col_kinds, rows)
    }
}

impl fmt::Display for HybridMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kinds = |ks: &[RowKind]| ks.iter().map(|k| k.token()).collect::<Vec<_>>().join(" ");
        writeln!(f, "rows: {}", kinds(&self.row_kinds))?;
        writeln!(f, "cols: {}", kinds(&self.col_kinds))?;
        for i in 0..self.rows() {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// The `2 × 2` matrix `[[a, b], [c, d]]` with one standard row and one minplus
/// row: `y1 = a x1 + b x2`, `y2 = min(c + x1, d + x2)`.
pub fn two_node_example(a: f64, b: f64, c: f64, d: f64) -> HybridMatrix {
    let kinds = vec![RowKind::Standard, RowKind::MinPlus];
    HybridMatrix::from_f64_rows(kinds.clone(), kinds, &[vec![a, b], vec![c, d]])
        .expect("static shape")
}

/// A stored pair `(M, x)` with `(M ⊠ M) ⊠ x ≠ M ⊠ (M ⊠ x)`.
pub fn non_associativity_witness() -> (HybridMatrix, HybridVector) {
    let m = two_node_example(0.5, 0.5, 0.0, 0.0);
    let x = HybridVector::from_f64(m.col_kinds().to_vec(), &[1.0, 2.0]).expect("static shape");
    (m, x)
}
