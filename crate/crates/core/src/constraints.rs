//! The mean-value polytope `Gamma_tau = {P : E_P(T) = tau}`.
//!
//! Vertices of `Gamma_tau` are the basic feasible solutions of
//! `{p >= 0, sum p = 1, T p = tau}`: distributions whose support columns
//! `[1; t(x)]` are linearly independent, hence supports of size at most
//! `k + 1`. They are found by solving the linear system on every such support.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{min_norm_solve, rank};
use crate::prob::{check_len, moment, Distribution, Statistic};

/// Membership tolerance on `||E_P(T) - tau||_inf`.
pub const CONTAINS_TOL: f64 = 1e-8;
/// Vertices closer than this in L-infinity are merged.
pub const DEDUP_TOL: f64 = 1e-8;
const NEG_TOL: f64 = 1e-10;

/// Limits on the size of a vertex enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_n: usize,
    pub max_k: usize,
}

impl Default for EnumerationLimits {
    /// `N <= 20`, `k <= 3`; `MAXENT_MAX_N` overrides the first.
    fn default() -> Self {
        let max_n = std::env::var("MAXENT_MAX_N")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(20);
        Self { max_n, max_k: 3 }
    }
}

/// A mean-value constraint set.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTau {
    statistic: Statistic,
    tau: Vec<f64>,
}

impl GammaTau {
    pub fn new(statistic: Statistic, tau: Vec<f64>) -> Result<Self> {
        check_len(statistic.k(), tau.len())?;
        for (row, &target) in statistic.rows().iter().zip(&tau) {
            if row.iter().all(|&v| v == 0.0) && target != 0.0 {
                return Err(Error::InvalidStatistic(
                    "all-zero statistic row with a nonzero target".into(),
                ));
            }
        }
        if tau.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStatistic("non-finite target".into()));
        }
        Ok(Self { statistic, tau })
    }

    /// Scalar statistic `t(x_i) = values[i]` with target `tau`.
    pub fn scalar(values: &[f64], tau: f64) -> Result<Self> {
        Self::new(Statistic::scalar(values)?, vec![tau])
    }

    /// The unconstrained simplex over `n` outcomes.
    pub fn full_simplex(n: usize) -> Self {
        Self {
            statistic: Statistic::new(vec![vec![0.0; n]]).expect("n >= 1"),
            tau: vec![0.0],
        }
    }

    pub fn statistic(&self) -> &Statistic {
        &self.statistic
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn n(&self) -> usize {
        self.statistic.n()
    }

    pub fn k(&self) -> usize {
        self.statistic.k()
    }

    /// Same statistic, different target.
    pub fn with_tau(&self, tau: Vec<f64>) -> Result<Self> {
        Self::new(self.statistic.clone(), tau)
    }
}

/// Vertices of a nonempty `Gamma_tau`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    pub vertices: Vec<Distribution>,
    pub supports: Vec<Vec<usize>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Outcomes charged by some member of the polytope.
    pub fn union_support(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.supports.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

pub fn feasible(g: &GammaTau) -> bool {
    vertices(g).is_ok()
}

pub fn vertices(g: &GammaTau) -> Result<VertexSet> {
    vertices_with_limits(g, EnumerationLimits::default())
}

pub fn vertices_with_limits(g: &GammaTau, limits: EnumerationLimits) -> Result<VertexSet> {
    let (n, k) = (g.n(), g.k());
    let max_size = (k + 1).min(n);
    if n > limits.max_n || k > limits.max_k {
        let supports: u128 = (1..=max_size).map(|s| binomial(n, s)).sum();
        return Err(Error::CombinatorialBlowup {
            supports,
            reason: format!("N = {n} (cap {}), k = {k} (cap {})", limits.max_n, limits.max_k),
        });
    }
    let rows = g.statistic.rows();
    let mut rhs = vec![1.0];
    rhs.extend_from_slice(&g.tau);
    let b = DVector::from_vec(rhs);
    let scale = 1.0 + b.amax();

    let mut found: Vec<Vec<f64>> = Vec::new();
    for size in 1..=max_size {
        for support in Combinations::new(n, size) {
            let a = DMatrix::from_fn(k + 1, size, |r, c| if r == 0 { 1.0 } else { rows[r - 1][support[c]] });
            if rank(&a) < size {
                continue;
            }
            let (x, resid) = min_norm_solve(&a, &b);
            if resid > 1e-9 * scale || x.iter().any(|&v| v < -NEG_TOL) {
                continue;
            }
            let mut p = vec![0.0; n];
            for (c, &i) in support.iter().enumerate() {
                p[i] = x[c].max(0.0);
            }
            if !found.iter().any(|q| linf(q, &p) <= DEDUP_TOL) {
                found.push(p);
            }
        }
    }
    if found.is_empty() {
        return Err(Error::Infeasible);
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vertices: Vec<Distribution> = found.into_iter().map(Distribution::normalized).collect::<Result<_>>()?;
    let supports = vertices.iter().map(|v| v.support(0.0)).collect();
    Ok(VertexSet { vertices, supports })
}

pub fn contains(g: &GammaTau, p: &Distribution) -> bool {
    match moment(p, &g.statistic) {
        Ok(m) => linf(&m, &g.tau) <= CONTAINS_TOL,
        Err(_) => false,
    }
}

/// `Gamma_tau` is closed under conditioning exactly when it is the set of all
/// distributions on `{x : t(x) = tau}`.
pub fn closed_under_conditioning(g: &GammaTau, vs: &VertexSet) -> bool {
    vs.union_support()
        .iter()
        .all(|&x| linf(&g.statistic.at(x), &g.tau) <= 1e-9)
}

/// Position of a target relative to the convex hull of `t(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HullPosition {
    /// In the relative interior.
    Interior,
    Boundary,
    Outside,
}

const HULL_TOL: f64 = 1e-9;

pub fn hull_interior(t: &Statistic, tau: &[f64]) -> HullPosition {
    if t.k() == 1 {
        let row = &t.rows()[0];
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let x = tau[0];
        return if x < lo - HULL_TOL || x > hi + HULL_TOL {
            HullPosition::Outside
        } else if (hi - lo) <= HULL_TOL || (x > lo + HULL_TOL && x < hi - HULL_TOL) {
            HullPosition::Interior
        } else {
            HullPosition::Boundary
        };
    }
    let g = match GammaTau::new(t.clone(), tau.to_vec()) {
        Ok(g) => g,
        Err(_) => return HullPosition::Outside,
    };
    match vertices(&g) {
        Err(_) => HullPosition::Outside,
        Ok(vs) => {
            // relative interior <=> some member of Gamma_tau charges every outcome
            let charged = (0..t.n()).all(|x| vs.vertices.iter().any(|v| v.get(x) > HULL_TOL));
            if charged {
                HullPosition::Interior
            } else {
                HullPosition::Boundary
            }
        }
    }
}

pub(crate) fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n || k == 0,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
