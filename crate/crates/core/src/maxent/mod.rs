//! Saddle points of mean-value games and the `tau <-> beta` duality.
//!
//! For a loss model and a statistic `T`, [`solve`] finds the pair
//! `(P*, zeta*)` on `Gamma_tau`: `P*` maximizes the generalized entropy and
//! `zeta*`, the Bayes act against it, minimizes the worst-case expected loss.
//! The game value is the specific entropy `h(tau)`. When the loss vector of
//! `zeta*` is affine in `t(x)` on the support of `P*` (and dominated by that
//! affine function elsewhere), its coefficients `(beta0, beta)` are reported;
//! `beta` is then a supergradient of `h` at `tau`.

mod brier;
mod duality;
mod family;
pub(crate) mod fw;
mod generic;
mod log;
mod zero_one;

pub use brier::solve_brier;
pub use duality::{beta_derivative_check, conjugacy_check, ConjugacyReport, DerivativeReport, DerivativeRow};
pub use family::{lafferty_family, support_scan, trace_family, FamilyTrace, SupportScan, TraceInvariants, TraceRow};
pub use generic::{natural_tilt, solve_generic, Tilt, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use log::{kappa, solve_log};
pub use zero_one::{solve_zero_one, ActFamily};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::constraints::{contains, hull_interior, vertices, GammaTau, HullPosition, VertexSet};
use crate::divergence::equalizer_check;
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{min_norm_solve, null_space, rank};
use crate::losses::{LossModel, ModelFamily};
use crate::prob::{expected_loss, Act, Distribution, Statistic};
use crate::verify::lp::{Cmp, LinearProgram};

/// `|L(P*, zeta*) - H*|` allowed by the Bayes half of the saddle check.
pub const BAYES_TOL: f64 = 1e-8;
/// Slack allowed on `max_V L(V, zeta*) <= H*`.
pub const VERTEX_TOL: f64 = 1e-7;
/// Residual allowed when fitting `beta0 + beta^T t(x)` to a loss vector.
pub const LINEAR_TOL: f64 = 1e-7;
/// Mass below this is treated as off the support of `P*`.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SaddleFlags {
    /// Loss vector of `zeta*` is affine in `t` on all of `X`.
    pub is_linear: bool,
    /// Affine on the support of `P*` and below that hyperplane elsewhere.
    pub is_regular: bool,
    /// `L(P, zeta*)` constant over `Gamma_tau`.
    pub is_equalizer: bool,
    pub tau_interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub solver: String,
    pub iterations: usize,
    /// Frank-Wolfe gap for iterative solvers, zero for closed forms.
    pub gap: f64,
    /// `||tau - E_Q T||_inf` at the last Newton iterate (log model).
    pub gradient_norm: Option<f64>,
    /// `|L(P*, zeta*) - H*|`.
    pub bayes_margin: f64,
    /// `max_V L(V, zeta*) - H*` over the vertices of `Gamma_tau`.
    pub vertex_margin: f64,
    /// Both saddle conditions hold within [`BAYES_TOL`] / [`VERTEX_TOL`].
    pub verified: bool,
    /// Set of robust Bayes acts when it is not a singleton.
    pub family: Option<ActFamily>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddlePoint {
    pub tau: Vec<f64>,
    pub p_star: Distribution,
    pub zeta_star: Act,
    /// Game value `h(tau)`.
    pub h_star: f64,
    pub beta0: Option<f64>,
    pub beta: Option<Vec<f64>>,
    pub flags: SaddleFlags,
    pub diagnostics: Diagnostics,
}

impl SaddlePoint {
    /// Loss of `zeta*` at each outcome.
    pub fn loss_vector(&self, model: &dyn LossModel) -> Result<Vec<ExtReal>> {
        model.loss_vector(&self.zeta_star)
    }
}

/// Solves with the specialized solver for the model's family, falling back to
/// [`solve_generic`].
pub fn solve(model: &dyn LossModel, g: &GammaTau) -> Result<SaddlePoint> {
    check_dims(model, g)?;
    match model.family() {
        ModelFamily::Brier => solve_brier(g),
        ModelFamily::Log(mu) => solve_log(g, &mu),
        ModelFamily::ZeroOne => solve_zero_one(g),
        _ => solve_generic(model, g, DEFAULT_TOL, DEFAULT_MAX_ITER),
    }
}

/// `h(tau)`; `-inf` when `Gamma_tau` is empty.
pub fn specific_entropy(model: &dyn LossModel, t: &Statistic, tau: &[f64]) -> Result<f64> {
    let g = GammaTau::new(t.clone(), tau.to_vec())?;
    match solve(model, &g) {
        Ok(sp) => Ok(sp.h_star),
        Err(Error::Infeasible) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

pub(crate) fn check_dims(model: &dyn LossModel, g: &GammaTau) -> Result<()> {
    crate::prob::check_len(model.space().len(), g.n())
}

/// Result of fitting `L(x) = beta0 + beta^T t(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub beta0: f64,
    pub beta: Vec<f64>,
}

fn design(t: &Statistic, rows: &[usize]) -> DMatrix<f64> {
    let k = t.k();
    DMatrix::from_fn(
        rows.len(),
        k + 1,
        |i, j| if j == 0 { 1.0 } else { t.rows()[j - 1][rows[i]] },
    )
}

/// Least-squares affine fit over all outcomes; `Some` when the loss vector is
/// affine in `t` within [`LINEAR_TOL`].
pub fn fit_linear(loss: &[ExtReal], t: &Statistic) -> Option<LinearFit> {
    let vals: Vec<f64> = loss.iter().map(|l| l.finite()).collect::<Option<_>>()?;
    let all: Vec<usize> = (0..vals.len()).collect();
    let a = design(t, &all);
    let (x, _) = min_norm_solve(&a, &DVector::from_vec(vals.clone()));
    let fitted = &a * &x;
    let worst = fitted.iter().zip(&vals).map(|(f, v)| (f - v).abs()).fold(0.0, f64::max);
    (worst <= LINEAR_TOL).then(|| LinearFit {
        beta0: x[0],
        beta: x.iter().skip(1).copied().collect(),
    })
}

/// Supporting-hyperplane coefficients: `L(x) = beta0 + beta^T t(x)` on
/// `support`, `L(x) <= beta0 + beta^T t(x)` off it. Among admissible
/// coefficients the one with least `|beta|_1` is returned.
pub fn fit_regular(loss: &[ExtReal], t: &Statistic, support: &[usize]) -> Option<LinearFit> {
    let n = loss.len();
    let k = t.k();
    let sup_vals: Vec<f64> = support.iter().map(|&x| loss[x].finite()).collect::<Option<_>>()?;
    let off: Vec<usize> = (0..n).filter(|x| !support.contains(x)).collect();
    let off_vals: Vec<f64> = off.iter().map(|&x| loss[x].finite()).collect::<Option<_>>()?;

    let a = design(t, support);
    let b = DVector::from_vec(sup_vals.clone());
    let (x0, _) = min_norm_solve(&a, &b);
    let fitted = &a * &x0;
    let worst = fitted
        .iter()
        .zip(&sup_vals)
        .map(|(f, v)| (f - v).abs())
        .fold(0.0, f64::max);
    if worst > LINEAR_TOL {
        return None;
    }
    let dominates = |c: &[f64]| {
        off.iter().zip(&off_vals).all(|(&x, &l)| {
            let v = c[0] + (0..k).map(|j| c[j + 1] * t.rows()[j][x]).sum::<f64>();
            l <= v + LINEAR_TOL
        })
    };
    if rank(&a) == k + 1 {
        let c: Vec<f64> = x0.iter().copied().collect();
        return dominates(&c).then(|| LinearFit {
            beta0: c[0],
            beta: c[1..].to_vec(),
        });
    }

    // c = x0 + Z y over the null space; minimize sum |beta_j| subject to the
    // off-support inequalities
    let z = null_space(&a);
    let d = z.ncols();
    let nv = d + k;
    let mut lp = LinearProgram::new(nv).minimize((0..nv).map(|i| if i < d { 0.0 } else { 1.0 }).collect());
    for i in 0..d {
        lp.set_free(i);
    }
    for j in 0..k {
        // u_j - (x0_j + Z_j y) >= 0 and u_j + (x0_j + Z_j y) >= 0
        let zj: Vec<f64> = (0..d).map(|c| z[(j + 1, c)]).collect();
        let mut plus = vec![0.0; nv];
        let mut minus = vec![0.0; nv];
        for c in 0..d {
            plus[c] = -zj[c];
            minus[c] = zj[c];
        }
        plus[d + j] = 1.0;
        minus[d + j] = 1.0;
        lp.constrain(plus, Cmp::Ge, x0[j + 1]);
        lp.constrain(minus, Cmp::Ge, -x0[j + 1]);
    }
    for (&x, &l) in off.iter().zip(&off_vals) {
        let row: Vec<f64> = (0..=k).map(|j| if j == 0 { 1.0 } else { t.rows()[j - 1][x] }).collect();
        let base: f64 = row.iter().zip(x0.iter()).map(|(r, c)| r * c).sum();
        let mut coeffs = vec![0.0; nv];
        for c in 0..d {
            coeffs[c] = (0..=k).map(|j| row[j] * z[(j, c)]).sum();
        }
        lp.constrain(coeffs, Cmp::Ge, l - base - 1e-12);
    }
    let sol = lp.solve().ok()?;
    let y = DVector::from_vec(sol.x[..d].to_vec());
    let c = &x0 + &z * y;
    let c: Vec<f64> = c.iter().copied().collect();
    dominates(&c).then(|| LinearFit {
        beta0: c[0],
        beta: c[1..].to_vec(),
    })
}

/// Builds a [`SaddlePoint`] from a candidate pair: verifies both saddle
/// conditions against the vertices and fills the flags and coefficients.
pub(crate) fn assemble(
    model: &dyn LossModel,
    g: &GammaTau,
    vs: &VertexSet,
    p_star: Distribution,
    zeta_star: Act,
    h_star: f64,
    diagnostics: Diagnostics,
) -> Result<SaddlePoint> {
    let loss = model.loss_vector(&zeta_star)?;
    let l_star = expected_loss(&p_star, &zeta_star, model)?.to_f64();
    let bayes_margin = (l_star - h_star).abs();
    let mut vertex_max = f64::NEG_INFINITY;
    for v in &vs.vertices {
        vertex_max = vertex_max.max(expected_loss(v, &zeta_star, model)?.to_f64());
    }
    let vertex_margin = vertex_max - h_star;

    let t = g.statistic();
    let support = p_star.support(SUPPORT_TOL);
    let linear = fit_linear(&loss, t);
    let regular = match &linear {
        Some(f) => Some(f.clone()),
        None => fit_regular(&loss, t, &support),
    };
    let eq = equalizer_check(model, &vs.vertices, &zeta_star)?;
    let flags = SaddleFlags {
        is_linear: linear.is_some(),
        is_regular: regular.is_some(),
        is_equalizer: eq.is_equalizer,
        tau_interior: hull_interior(t, g.tau()) == HullPosition::Interior,
    };
    let diagnostics = Diagnostics {
        bayes_margin,
        vertex_margin,
        verified: bayes_margin <= BAYES_TOL && vertex_margin <= VERTEX_TOL && contains(g, &p_star),
        ..diagnostics
    };
    Ok(SaddlePoint {
        tau: g.tau().to_vec(),
        p_star,
        zeta_star,
        h_star,
        beta0: regular.as_ref().map(|f| f.beta0),
        beta: regular.map(|f| f.beta),
        flags,
        diagnostics,
    })
}

pub(crate) fn diagnostics(solver: &str) -> Diagnostics {
    Diagnostics {
        solver: solver.into(),
        iterations: 0,
        gap: 0.0,
        gradient_norm: None,
        bayes_margin: 0.0,
        vertex_margin: 0.0,
        verified: false,
        family: None,
    }
}

/// Vertices of a feasible `Gamma_tau`, mapping emptiness to `Infeasible`.
pub(crate) fn feasible_vertices(g: &GammaTau) -> Result<VertexSet> {
    let vs = vertices(g)?;
    if vs.is_empty() {
        return Err(Error::Infeasible);
    }
    Ok(vs)
}
