use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TropicalError;
use crate::scalar::{ExtendedReal, E, EPS};

/// Dense minplus matrix. `ε` entries encode absent edges of the precedence graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinPlusMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExtendedReal>,
}

pub type MinPlusVector = Vec<ExtendedReal>;

impl MinPlusMatrix {
    pub fn filled(rows: usize, cols: usize, value: ExtendedReal) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// All-`ε` matrix.
    pub fn eps(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, EPS)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::eps(n, n);
        for i in 0..n {
            m[(i, i)] = E;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExtendedReal>>) -> Result<Self, TropicalError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
            return Err(TropicalError::RaggedRow {
                row: i,
                expected: c,
                found: row.len(),
            });
        }
        let data: Vec<_> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| *x == ExtendedReal::NegInf) {
            log::warn!("-inf entry in a minplus matrix; products follow the +inf-absorbing convention");
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Builds from `f64` rows, `f64::INFINITY` standing for `ε`.
    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self, TropicalError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ExtendedReal::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[ExtendedReal] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> ExtendedReal {
        self.data[i * self.cols + j]
    }

    /// Elementwise `⊕` (min).
    pub fn oplus(&self, other: &Self) -> Result<Self, TropicalError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(TropicalError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.oplus(*b))
                .collect(),
        })
    }

    /// `(A ⊗ B)_ik = min_j (A_ij + B_jk)`.
    pub fn otimes(&self, other: &Self) -> Result<Self, TropicalError> {
        if self.cols != other.rows {
            return Err(TropicalError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::eps(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_eps() {
                    continue;
                }
                for k in 0..other.cols {
                    let v = a.otimes(other.get(j, k));
                    let cell = &mut out[(i, k)];
                    *cell = cell.oplus(v);
                }
            }
        }
        Ok(out)
    }

    /// `A ⊗ x` for a column vector.
    pub fn apply(&self, x: &[ExtendedReal]) -> Result<MinPlusVector, TropicalError> {
        if x.len() != self.cols {
            return Err(TropicalError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(EPS, |acc, (a, b)| acc.oplus(a.otimes(*b)))
            })
            .collect())
    }

    /// `x ⊗ A` for a row vector.
    pub fn apply_left(&self, x: &[ExtendedReal]) -> Result<MinPlusVector, TropicalError> {
        if x.len() != self.rows {
            return Err(TropicalError::DimensionMismatch {
                left: (1, x.len()),
                right: (self.rows, self.cols),
            });
        }
        Ok((0..self.cols)
            .map(|k| {
                (0..self.rows).fold(EPS, |acc, j| acc.oplus(x[j].otimes(self.get(j, k))))
            })
            .collect())
    }

    /// Adds `c` to every finite entry.
    pub fn shift_finite(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| match x.finite() {
                    Some(v) => ExtendedReal::Finite(v + c),
                    None => *x,
                })
                .collect(),
        }
    }

    /// Parses the dense text format: one row per line, whitespace separated,
    /// `inf` / `-inf` for infinities, `#` comments.
    pub fn parse_text(text: &str) -> Result<Self, TropicalError> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<ExtendedReal>().map_err(|_| TropicalError::Parse {
                        line: lineno + 1,
                        token: tok.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(TropicalError::Empty);
        }
        Self::from_rows(rows)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl std::ops::Index<(usize, usize)> for MinPlusMatrix {
    type Output = ExtendedReal;
    fn index(&self, (i, j): (usize, usize)) -> &ExtendedReal {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MinPlusMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExtendedReal {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for MinPlusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for MinPlusMatrix {
    type Err = TropicalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Finite;

    fn m(rows: &[Vec<f64>]) -> MinPlusMatrix {
        MinPlusMatrix::from_f64_rows(rows).unwrap()
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn product_of_two_cycle() {
        let a = m(&[vec![INF, 3.0], vec![1.0, INF]]);
        assert_eq!(a.otimes(&a).unwrap(), m(&[vec![4.0, INF], vec![INF, 4.0]]));
        assert_eq!(a.otimes(&MinPlusMatrix::identity(2)).unwrap(), a);
        assert_eq!(MinPlusMatrix::identity(2).otimes(&a).unwrap(), a);
    }

    #[test]
    fn row_vector_product() {
        let a = m(&[vec![INF, 3.0], vec![1.0, INF]]);
        assert_eq!(a.apply_left(&[E, E]).unwrap(), vec![Finite(1.0), Finite(3.0)]);
    }

    #[test]
    fn dimension_mismatch() {
        let a = MinPlusMatrix::eps(2, 3);
        assert!(matches!(
            a.otimes(&a),
            Err(TropicalError::DimensionMismatch { .. })
        ));
        assert!(a.apply(&[E]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "# two-cycle\ninf 3\n1 -inf\n";
        let a = MinPlusMatrix::parse_text(text).unwrap();
        assert_eq!(a.get(1, 1), ExtendedReal::NegInf);
        assert_eq!(MinPlusMatrix::parse_text(&a.to_text()).unwrap(), a);
        assert!(matches!(
            MinPlusMatrix::parse_text("1 2\n3"),
            Err(TropicalError::RaggedRow { .. })
        ));
        assert!(matches!(
            MinPlusMatrix::parse_text("1 x"),
            Err(TropicalError::Parse { line: 1, .. })
        ));
    }
}
