//! Away-step Frank-Wolfe for `max F(w) = H(A w) + c^T w` over the weight
//! simplex, where the columns of `A` ("atoms") are distributions.
//!
//! `H` is concave and its supergradient at `P` is the loss vector of the Bayes
//! act `zeta_P`, so coordinate `j` of a supergradient of `F` is
//! `L(a_j, zeta_P) + c_j`. Line searches bisect on the sign of the
//! directional supergradient.

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::losses::LossModel;
use crate::prob::{mixture_of, Distribution};

const LINE_SEARCH_STEPS: usize = 60;
/// Weights below this are dropped from the active set.
const DROP_TOL: f64 = 1e-15;

pub(crate) struct FwProblem<'a> {
    pub model: &'a dyn LossModel,
    pub atoms: &'a [Distribution],
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct FwResult {
    pub weights: Vec<f64>,
    pub point: Distribution,
    /// `F` at the returned weights.
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FwProblem<'_> {
    fn point(&self, w: &[f64]) -> Result<Distribution> {
        mixture_of(self.atoms, w)
    }

    /// Supergradient coordinates; `+inf` where the atom charges an outcome
    /// that the current point does not (possible for the log score).
    fn grad(&self, p: &Distribution) -> Result<Vec<f64>> {
        let act = self.model.bayes_act(p)?.act;
        let losses = self.model.loss_vector(&act)?;
        self.atoms
            .iter()
            .zip(&self.offsets)
            .map(|(a, c)| {
                let mut acc = ExtReal::ZERO;
                for (w, l) in a.as_slice().iter().zip(&losses) {
                    acc = acc.checked_add(l.scale(*w))?;
                }
                Ok(acc.to_f64() + c)
            })
            .collect()
    }

    fn value(&self, w: &[f64], p: &Distribution) -> Result<f64> {
        let h = self.model.entropy(p)?;
        Ok(h + w.iter().zip(&self.offsets).map(|(a, b)| a * b).sum::<f64>())
    }

    /// Directional supergradient `<g(w + s d), d>`.
    fn slope(&self, w: &[f64], d: &[f64], s: f64) -> Result<f64> {
        let trial: Vec<f64> = w.iter().zip(d).map(|(a, b)| (a + s * b).max(0.0)).collect();
        let p = self.point(&normalize(trial))?;
        let g = self.grad(&p)?;
        Ok(g.iter()
            .zip(d)
            .filter(|(_, &dj)| dj != 0.0)
            .map(|(gj, dj)| gj * dj)
            .sum())
    }

    pub fn solve(&self, tol: f64, max_iter: usize) -> Result<FwResult> {
        let m = self.atoms.len();
        if m == 0 {
            return Err(Error::Infeasible);
        }
        let mut w = vec![1.0 / m as f64; m];
        let mut gap = f64::INFINITY;
        let mut iterations = 0;
        while iterations < max_iter {
            let p = self.point(&w)?;
            let g = self.grad(&p)?;
            let gw: f64 = g.iter().zip(&w).filter(|(_, &wj)| wj > 0.0).map(|(a, b)| a * b).sum();
            let s = argmax(&g);
            let fw_gap = g[s] - gw;
            gap = fw_gap;
            if fw_gap <= tol {
                break;
            }
            iterations += 1;
            let active: Vec<usize> = (0..m).filter(|&j| w[j] > 0.0).collect();
            let v = *active
                .iter()
                .min_by(|&&a, &&b| g[a].partial_cmp(&g[b]).unwrap_or(std::cmp::Ordering::Equal))
                .expect("weights sum to one");
            let away_gap = gw - g[v];
            let (d, smax) = if fw_gap >= away_gap || active.len() == 1 {
                let mut d: Vec<f64> = w.iter().map(|x| -x).collect();
                d[s] += 1.0;
                (d, 1.0)
            } else {
                let mut d = w.clone();
                d[v] -= 1.0;
                (d, w[v] / (1.0 - w[v]))
            };
            let step = self.line_search(&w, &d, smax)?;
            for j in 0..m {
                w[j] += step * d[j];
                if w[j] < DROP_TOL {
                    w[j] = 0.0;
                }
            }
            if step >= smax && smax < 1.0 {
                w[v] = 0.0;
            }
            w = normalize(w);
        }
        let point = self.point(&w)?;
        let value = self.value(&w, &point)?;
        Ok(FwResult {
            converged: gap <= tol,
            weights: w,
            point,
            value,
            gap,
            iterations,
        })
    }

    fn line_search(&self, w: &[f64], d: &[f64], smax: f64) -> Result<f64> {
        if self.slope(w, d, smax)? >= 0.0 {
            return Ok(smax);
        }
        let (mut lo, mut hi) = (0.0, smax);
        for _ in 0..LINE_SEARCH_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.slope(w, d, mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn argmax(g: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in g.iter().enumerate() {
        if v > g[best] {
            best = j;
        }
    }
    best
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}
