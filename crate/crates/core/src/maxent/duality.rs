//! Numerical checks of the `h <-> chi` conjugacy and of `beta = h'(tau)`.

use serde::Serialize;

use crate::constraints::GammaTau;
use crate::error::Result;
use crate::losses::LossModel;
use crate::prob::Statistic;

use super::family::FamilyTrace;
use super::generic::natural_tilt;
use super::solve;

/// Outcome of [`conjugacy_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyReport {
    /// Per target `sigma`: `(sigma, h(sigma), min_beta chi(beta) + beta^T sigma)`.
    pub rows: Vec<(Vec<f64>, f64, f64)>,
    /// `max |h(sigma) - grid minimum|`.
    pub max_grid_residual: f64,
    /// `max (h(tau) - beta^T tau - chi(beta))` over both grids; should be `<= 0`.
    pub max_fenchel_violation: f64,
    /// `max |chi(beta) - (h(tau_beta) - beta^T tau_beta)|` with
    /// `tau_beta = E_{Q_beta} T`, i.e. equality at solver-matched pairs.
    pub max_matched_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Compares `h` with the grid transform `sigma -> min_beta chi(beta) + beta^T sigma`.
pub fn conjugacy_check(
    model: &dyn LossModel,
    t: &Statistic,
    tau_grid: &[Vec<f64>],
    beta_grid: &[Vec<f64>],
) -> Result<ConjugacyReport> {
    let mut chis = Vec::with_capacity(beta_grid.len());
    let mut matched = 0.0f64;
    for beta in beta_grid {
        let tilt = natural_tilt(model, t, beta)?;
        let g = GammaTau::new(t.clone(), tilt.tau.clone())?;
        let h = solve(model, &g)?.h_star;
        matched = matched.max((tilt.chi - (h - dot(beta, &tilt.tau))).abs());
        chis.push(tilt.chi);
    }
    let mut rows = Vec::with_capacity(tau_grid.len());
    let mut worst = 0.0f64;
    let mut fenchel = f64::NEG_INFINITY;
    for sigma in tau_grid {
        let h = solve(model, &GammaTau::new(t.clone(), sigma.clone())?)?.h_star;
        let mut best = f64::INFINITY;
        for (beta, chi) in beta_grid.iter().zip(&chis) {
            best = best.min(chi + dot(beta, sigma));
            fenchel = fenchel.max(h - dot(beta, sigma) - chi);
        }
        worst = worst.max((h - best).abs());
        rows.push((sigma.clone(), h, best));
    }
    Ok(ConjugacyReport {
        rows,
        max_grid_residual: worst,
        max_fenchel_violation: fenchel,
        max_matched_residual: matched,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeRow {
    pub tau: f64,
    pub beta: f64,
    /// `(h(tau) - h(tau - delta)) / delta`.
    pub left: f64,
    /// `(h(tau + delta) - h(tau)) / delta`.
    pub right: f64,
    pub kink: bool,
    /// `|central difference - beta|` at smooth rows, distance of `beta` from
    /// `[right, left]` at kinks.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub rows: Vec<DerivativeRow>,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One-sided slopes this far apart mark a kink of `h`.
const KINK_TOL: f64 = 1e-3;

/// Checks `beta = h'(tau)` at the interior regular rows of a scalar trace.
///
/// `h` is re-evaluated by the solver at `tau +- delta` rather than read from
/// neighbouring rows: a grid-step difference straddling a change of regime
/// (a point where `h''` jumps) is off by `O(step)` even where `h` is smooth.
/// At kinks the stored `beta` must lie in the superdifferential `[right, left]`.
pub fn beta_derivative_check(model: &dyn LossModel, trace: &FamilyTrace, delta: f64) -> Result<DerivativeReport> {
    let grid_step = trace
        .rows
        .windows(2)
        .map(|w| (w[1].tau[0] - w[0].tau[0]).abs())
        .fold(0.0, f64::max);
    let tolerance = 1e-4f64.max(3.0 * grid_step * grid_step);
    let t = &trace.statistic;
    let h_at = |tau: f64| -> Result<f64> { Ok(solve(model, &GammaTau::new(t.clone(), vec![tau])?)?.h_star) };

    let mut rows = Vec::new();
    for row in &trace.rows {
        let sp = &row.point;
        if t.k() != 1 || !sp.flags.tau_interior || !sp.flags.is_regular {
            continue;
        }
        let tau = row.tau[0];
        let beta = sp.beta.as_ref().expect("regular rows carry beta")[0];
        let h0 = sp.h_star;
        let left = (h0 - h_at(tau - delta)?) / delta;
        let right = (h_at(tau + delta)? - h0) / delta;
        let kink = (left - right).abs() > KINK_TOL;
        let error = if kink {
            (right - beta).max(beta - left).max(0.0)
        } else {
            (0.5 * (left + right) - beta).abs()
        };
        rows.push(DerivativeRow {
            tau,
            beta,
            left,
            right,
            kink,
            error,
        });
    }
    let max_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    Ok(DerivativeReport {
        passed: max_error <= tolerance,
        rows,
        max_error,
        tolerance,
    })
}
