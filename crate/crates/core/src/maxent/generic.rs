//! Model-agnostic solvers built on conditional gradient.

use serde::Serialize;

use crate::constraints::GammaTau;
use crate::error::{Error, Result};
use crate::losses::{LossModel, ModelFamily};
use crate::prob::{moment, Distribution, Statistic};
use crate::verify::lp::{Cmp, LinearProgram};

use super::fw::FwProblem;
use super::log::kappa;
use super::{assemble, check_dims, diagnostics, feasible_vertices, SaddlePoint};

/// Frank-Wolfe gap at which the iteration stops. A gap `g` bounds the entropy
/// shortfall, which for a strongly concave `H` bounds `|P - P*|^2`; `1e-12`
/// keeps the distribution error near `1e-6`.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Maximizes `H` over `Gamma_tau` by away-step Frank-Wolfe on the vertex
/// weights, then verifies the saddle conditions. Running out of iterations
/// is an error carrying the final gap.
pub fn solve_generic(model: &dyn LossModel, g: &GammaTau, tol: f64, max_iter: usize) -> Result<SaddlePoint> {
    check_dims(model, g)?;
    let vs = feasible_vertices(g)?;
    let pb = FwProblem {
        model,
        atoms: &vs.vertices,
        offsets: vec![0.0; vs.len()],
    };
    let r = pb.solve(tol, max_iter)?;
    if !r.converged {
        return Err(Error::MaxIterExceeded {
            iterations: r.iterations,
            gap: r.gap,
        });
    }
    let bayes = model.bayes_act(&r.point)?;
    let mut diag = diagnostics("frank_wolfe");
    diag.iterations = r.iterations;
    diag.gap = r.gap;
    assemble(model, g, &vs, r.point, bayes.act, bayes.entropy, diag)
}

/// The natural tilt `Q_beta = argmax_P H(P) - beta^T E_P T` and the value
/// `chi(beta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tilt {
    pub q: Distribution,
    pub chi: f64,
    /// `E_{Q_beta} T`.
    pub tau: Vec<f64>,
    pub iterations: usize,
    pub gap: f64,
    /// `|chi(beta) - kappa(beta)|` for the log model.
    pub kappa_residual: Option<f64>,
}

pub fn natural_tilt(model: &dyn LossModel, t: &Statistic, beta: &[f64]) -> Result<Tilt> {
    natural_tilt_with(model, t, beta, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub(crate) fn natural_tilt_with(
    model: &dyn LossModel,
    t: &Statistic,
    beta: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Tilt> {
    let n = model.space().len();
    crate::prob::check_len(n, t.n())?;
    crate::prob::check_len(t.k(), beta.len())?;
    let offsets: Vec<f64> = t.project(beta).into_iter().map(|v| -v).collect();

    if model.family() == ModelFamily::ZeroOne {
        return zero_one_tilt(t, &offsets);
    }
    let atoms: Vec<Distribution> = (0..n).map(|x| Distribution::point_mass(n, x)).collect();
    let pb = FwProblem {
        model,
        atoms: &atoms,
        offsets,
    };
    let r = pb.solve(tol, max_iter)?;
    if !r.converged {
        return Err(Error::MaxIterExceeded {
            iterations: r.iterations,
            gap: r.gap,
        });
    }
    let kappa_residual = match model.family() {
        ModelFamily::Log(mu) => Some((r.value - kappa(t, &mu, beta)).abs()),
        _ => None,
    };
    Ok(Tilt {
        tau: moment(&r.point, t)?,
        q: r.point,
        chi: r.value,
        iterations: r.iterations,
        gap: r.gap,
        kappa_residual,
    })
}

/// `max 1 - s + c^T p` subject to `p <= s` on the simplex.
fn zero_one_tilt(t: &Statistic, offsets: &[f64]) -> Result<Tilt> {
    let n = offsets.len();
    let mut c = offsets.to_vec();
    c.push(-1.0);
    let mut lp = LinearProgram::new(n + 1).maximize(c);
    for x in 0..n {
        let mut row = vec![0.0; n + 1];
        row[x] = 1.0;
        row[n] = -1.0;
        lp.constrain(row, Cmp::Le, 0.0);
    }
    let mut sum = vec![1.0; n + 1];
    sum[n] = 0.0;
    lp.constrain(sum, Cmp::Eq, 1.0);
    let sol = lp.solve()?;
    let q = Distribution::normalized(sol.x[..n].iter().map(|v| v.max(0.0)).collect())?;
    Ok(Tilt {
        tau: moment(&q, t)?,
        q,
        chi: 1.0 + sol.objective,
        iterations: 0,
        gap: 0.0,
        kappa_residual: None,
    })
}
