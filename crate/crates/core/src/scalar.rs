//! Extended reals `ℝ ∪ {−∞, +∞}` with the arithmetic conventions used by the
//! hybrid standard/minplus calculus.
//!
//! The two infinities are kept as explicit tags instead of IEEE infinities so
//! that every combination has a defined result:
//!
//! | operation            | convention                         |
//! |----------------------|------------------------------------|
//! | `0 × (±∞)`           | `0` (standard zero absorbs)        |
//! | `(+∞) ⊗ (−∞)`        | `+∞` (minplus zero `ε` absorbs)    |
//! | `x ⊕ y`              | `min(x, y)`                        |
//! | `a / b` (minplus)    | `a − b`, undefined for `∞/∞` alike |

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("minplus division {0} / {1} is undefined")]
    UndefinedDivision(ExtendedReal, ExtendedReal),
    #[error("invalid scalar token `{0}`")]
    Parse(String),
    #[error("NaN is not an extended real")]
    NaN,
}

/// A scalar of `ℝ ∪ {−∞, +∞}`. `PosInf` is the minplus zero `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtendedReal::{Finite, NegInf, PosInf};

/// Minplus zero `ε = +∞`.
pub const EPS: ExtendedReal = PosInf;
/// Minplus unit `e = 0`.
pub const E: ExtendedReal = Finite(0.0);

impl ExtendedReal {
    /// Converts an `f64`, mapping IEEE infinities onto the tags.
    pub fn from_f64(x: f64) -> Result<Self, ScalarError> {
        if x.is_nan() {
            Err(ScalarError::NaN)
        } else if x == f64::INFINITY {
            Ok(PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(NegInf)
        } else {
            Ok(Finite(x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(x) => x,
            PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_eps(self) -> bool {
        matches!(self, PosInf)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(x) => Some(x),
            _ => None,
        }
    }

    fn rank(self) -> (i8, f64) {
        match self {
            NegInf => (-1, 0.0),
            Finite(x) => (0, x),
            PosInf => (1, 0.0),
        }
    }

    /// Minplus sum `x ⊕ y = min(x, y)`.
    pub fn oplus(self, other: Self) -> Self {
        if self.total_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Minplus product `x ⊗ y = x + y`; `+∞` absorbs everything, including `−∞`.
    pub fn otimes(self, other: Self) -> Self {
        match (self, other) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// Standard sum. Shares the convention table of `⊗`.
    pub fn add(self, other: Self) -> Self {
        self.otimes(other)
    }

    /// Standard product with `0 × (±∞) = 0`.
    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a * b),
            (Finite(z), _) | (_, Finite(z)) if z == 0.0 => Finite(0.0),
            (Finite(a), inf) | (inf, Finite(a)) => {
                if a > 0.0 {
                    inf
                } else {
                    inf.neg()
                }
            }
            (NegInf, NegInf) | (PosInf, PosInf) => PosInf,
            _ => NegInf,
        }
    }

    pub fn neg(self) -> Self {
        match self {
            NegInf => PosInf,
            Finite(x) => Finite(-x),
            PosInf => NegInf,
        }
    }

    /// Minplus division `a / b`: the solution `a − b` of `b ⊗ x = a`.
    pub fn odiv(self, b: Self) -> Result<Self, ScalarError> {
        match (self, b) {
            (PosInf, PosInf) | (NegInf, NegInf) => Err(ScalarError::UndefinedDivision(self, b)),
            _ => Ok(self.otimes(b.neg())),
        }
    }

    /// Total order `−∞ < finite < +∞`.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        let (ra, xa) = self.rank();
        let (rb, xb) = other.rank();
        ra.cmp(&rb).then(xa.total_cmp(&xb))
    }
}

impl Default for ExtendedReal {
    fn default() -> Self {
        EPS
    }
}

impl From<f64> for ExtendedReal {
    /// Panics on NaN.
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x).expect("NaN is not an extended real")
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            PosInf => f.write_str("inf"),
            Finite(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "+inf" | "eps" | "ε" => Ok(PosInf),
            "-inf" => Ok(NegInf),
            _ => s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Finite)
                .ok_or_else(|| ScalarError::Parse(s.to_string())),
        }
    }
}
