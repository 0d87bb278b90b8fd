//! Extended reals with the measure-theoretic convention `0 · (+inf) = 0`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A real number or an infinity.
///
/// Losses may be `+inf` but never `-inf`; `-inf` only shows up as the entropy
/// of an empty constraint set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Lossy view as an `f64`, mapping infinities to the IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::NegInf => f64::NEG_INFINITY,
        }
    }

    /// Multiplies by a nonnegative weight; a zero weight annihilates infinities.
    pub fn scale(self, w: f64) -> Self {
        if w == 0.0 {
            return ExtReal::ZERO;
        }
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(w * x),
            inf if w > 0.0 => inf,
            ExtReal::PosInf => ExtReal::NegInf,
            ExtReal::NegInf => ExtReal::PosInf,
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => Ok(ExtReal::Finite(a + b)),
            (ExtReal::PosInf, ExtReal::NegInf) | (ExtReal::NegInf, ExtReal::PosInf) => Err(Error::UndefinedExpectation),
            (ExtReal::Finite(_), inf) | (inf, ExtReal::Finite(_)) => Ok(inf),
            (a, _) => Ok(a),
        }
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.checked_add(other.scale(-1.0))
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("+inf"),
            ExtReal::NegInf => f.write_str("-inf"),
        }
    }
}

/// Sums `weights[i] * values[i]` with `0 · inf = 0`.
pub fn weighted_sum(weights: &[f64], values: &[ExtReal]) -> Result<ExtReal> {
    weights
        .iter()
        .zip(values)
        .try_fold(ExtReal::ZERO, |acc, (&w, &v)| acc.checked_add(v.scale(w)))
}
