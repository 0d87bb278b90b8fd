//! Finite sample spaces, distributions, statistics and acts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::{weighted_sum, ExtReal};
use crate::losses::LossModel;

/// Tolerance on `|sum - 1|` for a probability vector.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Negative entries down to this value are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Ordered, labeled outcomes `x_1, ..., x_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpace {
    labels: Vec<String>,
}

impl SampleSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("no outcomes".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate label '{l}'")));
            }
        }
        Ok(Self { labels })
    }

    /// Outcomes labeled `x1 .. xn`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A probability vector over a finite sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validates a weight vector, clamping negatives in `[-1e-12, 0)` to zero.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let mut weights = weights;
        if weights.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for (index, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < -NEGATIVE_CLAMP {
                return Err(Error::NegativeWeight { index, value: *w });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { weights })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::NotNormalized { sum });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[at] = 1.0;
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Indices with weight strictly above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.weights[i] > tol).collect()
    }

    /// L-infinity distance.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.weights
    }
}

/// Checks a weight vector against a sample space.
pub fn validate_distribution(space: &SampleSpace, weights: &[f64]) -> Result<Distribution> {
    if weights.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: weights.len(),
        });
    }
    Distribution::new(weights.to_vec())
}

/// `(1 - lambda) P0 + lambda P1`.
pub fn mixture(p0: &Distribution, p1: &Distribution, lambda: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    check_len(p0.len(), p1.len())?;
    let weights = p0
        .weights
        .iter()
        .zip(&p1.weights)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    Ok(Distribution { weights })
}

/// Finite mixture `sum_i w_i P_i`.
pub fn mixture_of(components: &[Distribution], weights: &[f64]) -> Result<Distribution> {
    check_len(components.len(), weights.len())?;
    let n = components
        .first()
        .map(Distribution::len)
        .ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
    let mut out = vec![0.0; n];
    for (c, &w) in components.iter().zip(weights) {
        check_len(n, c.len())?;
        for (o, p) in out.iter_mut().zip(&c.weights) {
            *o += w * p;
        }
    }
    Distribution::new(out)
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Strictly positive base measure `mu{x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseMeasure {
    masses: Vec<f64>,
}

impl BaseMeasure {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::ZeroBaseMass { index, value });
            }
        }
        if masses.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(Self { masses })
    }

    pub fn counting(n: usize) -> Self {
        Self { masses: vec![1.0; n] }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total() - 1.0).abs() <= NORMALIZATION_TOL
    }
}

/// A vector statistic `t: X -> R^k`, stored as `k` rows of length `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    rows: Vec<Vec<f64>>,
}

impl Statistic {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = match rows.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => return Err(Error::InvalidStatistic("statistic needs k >= 1 rows".into())),
        };
        for r in &rows {
            check_len(n, r.len())?;
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidStatistic("non-finite entry".into()));
            }
        }
        Ok(Self { rows })
    }

    /// The scalar statistic `t(x_i) = values[i]`.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(vec![values.to_vec()])
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `t(x_i)` as a k-vector.
    pub fn at(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// `beta^T t(x)` for every outcome.
    pub fn project(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.rows.iter().zip(beta).map(|(r, b)| r[i] * b).sum())
            .collect()
    }
}

/// `E_P(T)`.
pub fn moment(p: &Distribution, t: &Statistic) -> Result<Vec<f64>> {
    check_len(t.n(), p.len())?;
    Ok(t.rows
        .iter()
        .map(|r| r.iter().zip(&p.weights).map(|(a, b)| a * b).sum())
        .collect())
}

/// What an act's payload means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActKind {
    /// A probability vector (quoted distribution or randomized point guess).
    Distribution,
    /// A density with respect to the model's base measure.
    Density,
    /// A single real number.
    Scalar,
}

/// An act available to the decision maker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Act {
    pub kind: ActKind,
    pub payload: Vec<f64>,
}

impl Act {
    pub fn distribution(p: &Distribution) -> Self {
        Self {
            kind: ActKind::Distribution,
            payload: p.as_slice().to_vec(),
        }
    }

    pub fn density(q: Vec<f64>) -> Self {
        Self {
            kind: ActKind::Density,
            payload: q,
        }
    }

    pub fn scalar(a: f64) -> Self {
        Self {
            kind: ActKind::Scalar,
            payload: vec![a],
        }
    }
}

/// `L(P, act) = sum_x P(x) L(x, act)`.
pub fn expected_loss(p: &Distribution, act: &Act, model: &dyn LossModel) -> Result<ExtReal> {
    let losses = model.loss_vector(act)?;
    check_len(losses.len(), p.len())?;
    weighted_sum(p.as_slice(), &losses)
}
