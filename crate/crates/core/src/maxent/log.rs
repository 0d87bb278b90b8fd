//! Log score: the maximum entropy family is the exponential family
//! `p(x) ∝ mu(x) exp(-beta^T t(x))`, fitted by damped Newton on the convex
//! dual `kappa(beta) + beta^T tau`.

use nalgebra::{DMatrix, DVector};

use crate::constraints::{hull_interior, GammaTau, HullPosition};
use crate::error::{Error, Result};
use crate::linalg::min_norm_solve;
use crate::losses::{log_model, LossModel};
use crate::prob::{Act, BaseMeasure, Distribution, SampleSpace, Statistic};

use super::{assemble, diagnostics, feasible_vertices, SaddlePoint};

pub const GRAD_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 100;
const MAX_FALLBACK: usize = 10_000;

/// `kappa(beta) = log sum_x mu(x) exp(-beta^T t(x))`.
pub fn kappa(t: &Statistic, mu: &BaseMeasure, beta: &[f64]) -> f64 {
    let all: Vec<usize> = (0..t.n()).collect();
    Dual::new(t, mu, &all).kappa(beta)
}

/// The dual objective restricted to a set of outcomes.
struct Dual<'a> {
    t: &'a Statistic,
    mu: &'a BaseMeasure,
    outcomes: &'a [usize],
}

impl<'a> Dual<'a> {
    fn new(t: &'a Statistic, mu: &'a BaseMeasure, outcomes: &'a [usize]) -> Self {
        Self { t, mu, outcomes }
    }

    fn exponents(&self, beta: &[f64]) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|&x| self.mu.masses()[x].ln() - (0..self.t.k()).map(|j| beta[j] * self.t.rows()[j][x]).sum::<f64>())
            .collect()
    }

    fn kappa(&self, beta: &[f64]) -> f64 {
        let e = self.exponents(beta);
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + e.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    }

    /// Tilted weights on the restricted outcomes.
    fn weights(&self, beta: &[f64]) -> Vec<f64> {
        let e = self.exponents(beta);
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = e.iter().map(|v| (v - m).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    }

    fn objective(&self, beta: &[f64], tau: &[f64]) -> f64 {
        self.kappa(beta) + beta.iter().zip(tau).map(|(b, t)| b * t).sum::<f64>()
    }

    /// Gradient `tau - E_Q T` and Hessian `Cov_Q T`.
    fn derivatives(&self, beta: &[f64], tau: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let k = self.t.k();
        let w = self.weights(beta);
        let mean: Vec<f64> = (0..k)
            .map(|j| {
                self.outcomes
                    .iter()
                    .zip(&w)
                    .map(|(&x, q)| q * self.t.rows()[j][x])
                    .sum()
            })
            .collect();
        let grad = (0..k).map(|j| tau[j] - mean[j]).collect();
        let hess = DMatrix::from_fn(k, k, |a, b| {
            self.outcomes
                .iter()
                .zip(&w)
                .map(|(&x, q)| q * (self.t.rows()[a][x] - mean[a]) * (self.t.rows()[b][x] - mean[b]))
                .sum()
        });
        (grad, hess)
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

struct Fit {
    beta: Vec<f64>,
    grad_norm: f64,
    iterations: usize,
}

fn newton(d: &Dual, tau: &[f64]) -> Fit {
    let k = tau.len();
    let mut beta = vec![0.0; k];
    let mut iterations = 0;
    loop {
        let (g, h) = d.derivatives(&beta, tau);
        let gn = norm_inf(&g);
        if gn <= GRAD_TOL || iterations >= MAX_NEWTON {
            return Fit {
                beta,
                grad_norm: gn,
                iterations,
            };
        }
        iterations += 1;
        // the objective's gradient is g and its Hessian h; Newton moves along -h^+ g
        let (step, _) = min_norm_solve(&h, &DVector::from_vec(g.clone()));
        let f0 = d.objective(&beta, tau);
        let slope: f64 = -step.iter().zip(&g).map(|(s, gi)| s * gi).sum::<f64>();
        let mut s = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, d)| b - s * d).collect();
            let f1 = d.objective(&trial, tau);
            if f1 <= f0 + 1e-4 * s * slope || (f1 - f0).abs() <= 1e-15 * f0.abs().max(1.0) {
                beta = trial;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if !moved {
            return Fit {
                beta,
                grad_norm: gn,
                iterations,
            };
        }
    }
}

/// Scalar fallback: the gradient `tau - E_Q T` is nondecreasing in `beta`.
fn bisection(d: &Dual, tau: f64) -> Fit {
    let grad = |b: f64| d.derivatives(&[b], &[tau]).0[0];
    let (mut lo, mut hi) = (-1.0, 1.0);
    while grad(lo) > 0.0 && lo > -1e6 {
        lo *= 2.0;
    }
    while grad(hi) < 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let mut iterations = 0;
    while iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let g = grad(mid);
        if g.abs() <= GRAD_TOL || hi - lo < 1e-15 {
            break;
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    Fit {
        beta: vec![b],
        grad_norm: grad(b).abs(),
        iterations,
    }
}

fn gradient_descent(d: &Dual, tau: &[f64], start: Vec<f64>) -> Fit {
    let mut beta = start;
    let mut step = 1.0;
    let mut iterations = 0;
    loop {
        let (g, _) = d.derivatives(&beta, tau);
        let gn = norm_inf(&g);
        if gn <= GRAD_TOL || iterations >= MAX_FALLBACK {
            return Fit {
                beta,
                grad_norm: gn,
                iterations,
            };
        }
        iterations += 1;
        let f0 = d.objective(&beta, tau);
        let g2: f64 = g.iter().map(|v| v * v).sum();
        loop {
            let trial: Vec<f64> = beta.iter().zip(&g).map(|(b, gi)| b - step * gi).collect();
            if d.objective(&trial, tau) <= f0 - 0.5 * step * g2 || step < 1e-20 {
                beta = trial;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
    }
}

/// Saddle point of the log-score game on `Gamma_tau` with base measure `mu`.
///
/// On the hull boundary the polytope lives on a face of the simplex; the fit
/// is then restricted to the outcomes charged by some member of `Gamma_tau`.
pub fn solve_log(g: &GammaTau, mu: &BaseMeasure) -> Result<SaddlePoint> {
    crate::prob::check_len(g.n(), mu.len())?;
    let vs = feasible_vertices(g)?;
    let t = g.statistic();
    let n = g.n();
    let interior = hull_interior(t, g.tau()) == HullPosition::Interior;
    let outcomes: Vec<usize> = if interior { (0..n).collect() } else { vs.union_support() };

    let mut diag = diagnostics("log_newton");
    let (p, h_star, fit) = if outcomes.len() == 1 {
        let x = outcomes[0];
        // a point mass: H = -log(1 / mu(x))
        (
            Distribution::point_mass(n, x).as_slice().to_vec(),
            mu.masses()[x].ln(),
            None,
        )
    } else {
        let dual = Dual::new(t, mu, &outcomes);
        let mut fit = newton(&dual, g.tau());
        if fit.grad_norm > GRAD_TOL {
            fit = if g.k() == 1 {
                diag.solver = "log_bisection".into();
                bisection(&dual, g.tau()[0])
            } else {
                diag.solver = "log_gradient_descent".into();
                gradient_descent(&dual, g.tau(), fit.beta)
            };
        }
        if fit.grad_norm > GRAD_TOL {
            return Err(Error::NewtonDivergence {
                gradient_norm: fit.grad_norm,
            });
        }
        let w = dual.weights(&fit.beta);
        let mut p = vec![0.0; n];
        for (&x, q) in outcomes.iter().zip(w) {
            p[x] = q;
        }
        let h = dual.objective(&fit.beta, g.tau());
        (p, h, Some(fit))
    };
    if let Some(f) = &fit {
        diag.iterations = f.iterations;
        diag.gradient_norm = Some(f.grad_norm);
    } else {
        diag.gradient_norm = Some(0.0);
    }
    let p_star = Distribution::new(p)?;
    let model = log_model(SampleSpace::indexed(n)?, mu.clone())?;
    let zeta = model.bayes_act(&p_star)?.act;
    let zeta = Act::density(zeta.payload);
    assemble(&model, g, &vs, p_star, zeta, h_star, diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(tau: f64) -> GammaTau {
        GammaTau::scalar(&[-1.0, 0.0, 1.0], tau).unwrap()
    }

    /// tau = (e^-b - e^b) / (1 + e^b + e^-b), solved by plain bisection.
    fn oracle_beta(tau: f64) -> f64 {
        let m = |b: f64| ((-b).exp() - b.exp()) / (1.0 + b.exp() + (-b).exp());
        let (mut lo, mut hi) = (-50.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m(mid) > tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn uniform_at_zero() {
        let sp = solve_log(&g(0.0), &BaseMeasure::counting(3)).unwrap();
        assert!((sp.h_star - 3f64.ln()).abs() < 1e-12);
        assert!(sp.beta.unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn matches_scalar_oracle() {
        let b = oracle_beta(0.5);
        let z = 1.0 + b.exp() + (-b).exp();
        let want = [b.exp() / z, 1.0 / z, (-b).exp() / z];
        let sp = solve_log(&g(0.5), &BaseMeasure::counting(3)).unwrap();
        assert!(sp
            .p_star
            .as_slice()
            .iter()
            .zip(&want)
            .all(|(a, w)| (a - w).abs() < 1e-10));
        assert!((sp.beta.unwrap()[0] - b).abs() < 1e-8);
        assert!((sp.p_star.get(0) - 0.1162).abs() < 1e-4 && (sp.p_star.get(2) - 0.6162).abs() < 1e-4);
        assert!((sp.h_star - (z.ln() + b / 2.0)).abs() < 1e-10);
        assert!(sp.diagnostics.gradient_norm.unwrap() <= GRAD_TOL);
    }

    #[test]
    fn boundary_is_a_point_mass() {
        let sp = solve_log(&g(1.0), &BaseMeasure::counting(3)).unwrap();
        assert_eq!(sp.h_star, 0.0);
        assert_eq!(sp.p_star.get(2), 1.0);
        assert!(!sp.flags.is_regular);
    }

    #[test]
    fn kappa_closed_form() {
        let t = Statistic::scalar(&[-1.0, 0.0, 1.0]).unwrap();
        let k = kappa(&t, &BaseMeasure::counting(3), &[1.0]);
        assert!((k - (1f64.exp() + 1.0 + (-1f64).exp()).ln()).abs() < 1e-14);
    }
}
