//! Independent oracles: a matrix-game LP solver, the restricted upper value,
//! and direct checks of the saddle conditions.

pub mod game;
pub mod lp;

pub use game::{lp_game_value, GameSolution, MatrixGame};

use serde::Serialize;

use crate::constraints::{closed_under_conditioning, vertices, GammaTau};
use crate::error::{Error, Result};
use crate::losses::{LossModel, ModelFamily};
use crate::maxent::{solve, BAYES_TOL, VERTEX_TOL};
use crate::prob::{expected_loss, Act, Distribution};
use crate::sampling::{random_distribution, seeded};

/// Acts tried besides the solver's when bounding the upper value of a game
/// with a continuum of acts.
const RANDOM_ACTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperValue {
    /// `min over candidate acts of max_V L(V, act)`.
    pub value: f64,
    /// The bound matches the saddle value within `1e-7`, so it is the upper
    /// value of the game.
    pub certified: bool,
    pub method: &'static str,
}

/// `inf_zeta sup_{P in Gamma_tau} L(P, zeta)`.
///
/// Zero-one acts are mixtures of finitely many pure guesses, so the value of
/// the (vertices x guesses) matrix game is exact. For other models the bound
/// is taken over the solver's act, the Bayes acts of the vertices and a seeded
/// cloud of random Bayes acts, and certified by the saddle value.
pub fn restricted_upper_value(model: &dyn LossModel, g: &GammaTau) -> Result<UpperValue> {
    let vs = vertices(g)?;
    if vs.is_empty() {
        return Err(Error::Infeasible);
    }
    let n = g.n();
    if model.family() == ModelFamily::ZeroOne {
        let payoff = vs
            .vertices
            .iter()
            .map(|v| (0..n).map(|a| 1.0 - v.get(a)).collect())
            .collect();
        let sol = lp_game_value(&MatrixGame::new(payoff)?)?;
        return Ok(UpperValue {
            value: sol.value,
            certified: true,
            method: "lp_game",
        });
    }
    let sp = solve(model, g)?;
    let mut acts: Vec<Act> = vec![sp.zeta_star.clone()];
    for v in &vs.vertices {
        acts.push(model.bayes_act(v)?.act);
    }
    let mut rng = seeded(0);
    for _ in 0..RANDOM_ACTS {
        acts.push(model.bayes_act(&random_distribution(&mut rng, n))?.act);
    }
    let mut best = f64::INFINITY;
    for a in &acts {
        let mut worst = f64::NEG_INFINITY;
        for v in &vs.vertices {
            worst = worst.max(expected_loss(v, a, model)?.to_f64());
        }
        best = best.min(worst);
    }
    Ok(UpperValue {
        value: best,
        certified: (best - sp.h_star).abs() <= VERTEX_TOL,
        method: "saddle_certificate",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleReport {
    /// `|L(P*, zeta*) - H(P*)|`: zero iff `zeta*` is Bayes against `P*`.
    pub bayes_margin: f64,
    pub bayes_ok: bool,
    /// `max_V L(V, zeta*) - L(P*, zeta*)`: nonpositive iff `P*` is a worst
    /// case for `zeta*`.
    pub vertex_margin: f64,
    pub vertex_ok: bool,
    /// `L(., zeta*)` constant over the vertices.
    pub equalizer: bool,
    pub passed: bool,
}

/// Checks both halves of the saddle condition for a candidate pair.
pub fn verify_saddle(
    model: &dyn LossModel,
    g: &GammaTau,
    p_star: &Distribution,
    zeta_star: &Act,
) -> Result<SaddleReport> {
    let vs = vertices(g)?;
    let l_star = expected_loss(p_star, zeta_star, model)?.to_f64();
    let h = model.entropy(p_star)?;
    let bayes_margin = (l_star - h).abs();
    let eq = crate::divergence::equalizer_check(model, &vs.vertices, zeta_star)?;
    let worst = eq.losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vertex_margin = worst - l_star;
    let bayes_ok = bayes_margin <= BAYES_TOL;
    let vertex_ok = vertex_margin <= VERTEX_TOL;
    Ok(SaddleReport {
        bayes_margin,
        bayes_ok,
        vertex_margin,
        vertex_ok,
        equalizer: eq.is_equalizer,
        passed: bayes_ok && vertex_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct USetReport {
    /// Outcomes with `|L(x, zeta*) - H*| <= 1e-8`.
    pub u: Vec<usize>,
    /// `P*(U) >= 1 - 1e-8`.
    pub supported: bool,
    /// The constraint set is closed under conditioning, so the support
    /// property is guaranteed by the theory.
    pub applicable: bool,
}

pub fn u_set_check(
    model: &dyn LossModel,
    g: &GammaTau,
    zeta_star: &Act,
    h_star: f64,
    p_star: &Distribution,
) -> Result<USetReport> {
    let losses = model.loss_vector(zeta_star)?;
    let u: Vec<usize> = losses
        .iter()
        .enumerate()
        .filter(|(_, l)| l.finite().is_some_and(|v| (v - h_star).abs() <= BAYES_TOL))
        .map(|(x, _)| x)
        .collect();
    let mass: f64 = u.iter().map(|&x| p_star.get(x)).sum();
    let applicable = match vertices(g) {
        Ok(vs) => closed_under_conditioning(g, &vs),
        Err(_) => false,
    };
    Ok(USetReport {
        u,
        supported: mass >= 1.0 - BAYES_TOL,
        applicable,
    })
}
