//! Generalized exponential families traced over a grid of targets.

use serde::Serialize;

use crate::constraints::GammaTau;
use crate::divergence::relative_model;
use crate::error::{Error, Result};
use crate::losses::LossModel;
use crate::prob::{expected_loss, ActKind, Distribution, Statistic};

use super::generic::natural_tilt;
use super::{assemble, diagnostics, feasible_vertices, solve, SaddlePoint};

/// Slack allowed on the monotonicity `(tau2 - tau1)^T (beta2 - beta1) <= 0`
/// and on concavity of `h` along the rows.
pub const TRACE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub tau: Vec<f64>,
    pub point: SaddlePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyTrace {
    pub model: String,
    #[serde(skip)]
    pub statistic: Statistic,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceInvariants {
    /// Scalar targets strictly increasing (vacuous for `k > 1`).
    pub increasing: bool,
    /// Largest violation of midpoint concavity of `h` over consecutive
    /// triples (scalar targets only).
    pub concavity_violation: f64,
    /// Largest `(tau2 - tau1)^T (beta2 - beta1)` over adjacent regular rows.
    pub monotonicity_violation: f64,
}

impl TraceInvariants {
    pub fn holds(&self) -> bool {
        self.increasing && self.concavity_violation <= TRACE_TOL && self.monotonicity_violation <= TRACE_TOL
    }
}

impl FamilyTrace {
    pub fn invariants(&self) -> TraceInvariants {
        let scalar = self.statistic.k() == 1;
        let increasing = !scalar || self.rows.windows(2).all(|w| w[1].tau[0] > w[0].tau[0]);
        let mut concavity_violation = 0.0f64;
        if scalar {
            for w in self.rows.windows(3) {
                let (a, b, c) = (&w[0], &w[1], &w[2]);
                let lam = (b.tau[0] - a.tau[0]) / (c.tau[0] - a.tau[0]);
                let chord = (1.0 - lam) * a.point.h_star + lam * c.point.h_star;
                concavity_violation = concavity_violation.max(chord - b.point.h_star);
            }
        }
        let mut monotonicity_violation = f64::NEG_INFINITY;
        for w in self.rows.windows(2) {
            if let (Some(b1), Some(b2)) = (&w[0].point.beta, &w[1].point.beta) {
                let v: f64 = (0..b1.len())
                    .map(|j| (w[1].tau[j] - w[0].tau[j]) * (b2[j] - b1[j]))
                    .sum();
                monotonicity_violation = monotonicity_violation.max(v);
            }
        }
        TraceInvariants {
            increasing,
            concavity_violation,
            monotonicity_violation: monotonicity_violation.max(0.0),
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau[0]).collect()
    }
}

/// Solves the game at every grid target, in grid order.
pub fn trace_family(model: &dyn LossModel, t: &Statistic, tau_grid: &[Vec<f64>]) -> Result<FamilyTrace> {
    let rows = tau_grid
        .iter()
        .map(|tau| {
            let g = GammaTau::new(t.clone(), tau.clone())?;
            Ok(TraceRow {
                tau: tau.clone(),
                point: solve(model, &g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyTrace {
        model: model.name().to_string(),
        statistic: t.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportScan {
    /// `s*(zeta_tau) = -L(P*, zeta_tau)` per trace row.
    pub values: Vec<f64>,
    pub argmax: usize,
    pub argmax_tau: Vec<f64>,
    pub max_value: f64,
}

/// Evaluates the support `-L(P*, zeta_tau)` of a fixed distribution along a
/// family and locates its maximum.
pub fn support_scan(model: &dyn LossModel, trace: &FamilyTrace, p_star: &Distribution) -> Result<SupportScan> {
    if trace.rows.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let values = trace
        .rows
        .iter()
        .map(|r| Ok(-expected_loss(p_star, &r.point.zeta_star, model)?.to_f64()))
        .collect::<Result<Vec<f64>>>()?;
    let mut argmax = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[argmax] {
            argmax = i;
        }
    }
    Ok(SupportScan {
        argmax_tau: trace.rows[argmax].tau.clone(),
        max_value: values[argmax],
        values,
        argmax,
    })
}

/// For each `beta`, the minimizer of `beta^T E_P T + d(P, P0)`: the natural
/// tilt of the game relative to the Bayes act against `P0`. Rows are sorted
/// by target and describe saddle points of that relative game.
pub fn lafferty_family(
    model: &dyn LossModel,
    p0: &Distribution,
    t: &Statistic,
    beta_grid: &[Vec<f64>],
) -> Result<FamilyTrace> {
    if model.act_kind() == ActKind::Scalar {
        return Err(Error::Unsupported {
            model: model.name().to_string(),
            what: "additive families need distribution-like acts".into(),
        });
    }
    crate::prob::check_len(model.space().len(), p0.len())?;
    let zeta0 = model.bayes_act(p0)?.act;
    let rel = relative_model(model, zeta0)?;
    let mut rows = Vec::with_capacity(beta_grid.len());
    for beta in beta_grid {
        let tilt = natural_tilt(&rel, t, beta)?;
        let g = GammaTau::new(t.clone(), tilt.tau.clone())?;
        let vs = feasible_vertices(&g)?;
        let bayes = rel.bayes_act(&tilt.q)?;
        let mut diag = diagnostics("natural_tilt");
        diag.iterations = tilt.iterations;
        diag.gap = tilt.gap;
        let point = assemble(&rel, &g, &vs, tilt.q, bayes.act, bayes.entropy, diag)?;
        rows.push(TraceRow { tau: tilt.tau, point });
    }
    rows.sort_by(|a, b| a.tau.partial_cmp(&b.tau).unwrap_or(std::cmp::Ordering::Equal));
    Ok(FamilyTrace {
        model: rel.name().to_string(),
        statistic: t.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{brier_model, log_model};
    use crate::prob::{BaseMeasure, SampleSpace};

    fn grid(from: f64, to: f64, steps: usize) -> Vec<Vec<f64>> {
        (0..=steps)
            .map(|i| vec![from + i as f64 * (to - from) / steps as f64])
            .collect()
    }

    #[test]
    fn brier_counterexample_scan() {
        let b = brier_model(SampleSpace::indexed(3).unwrap());
        let t = Statistic::scalar(&[-1.0, 0.0, 1.0]).unwrap();
        let trace = trace_family(&b, &t, &grid(-1.0, 1.0, 40)).unwrap();
        assert!(trace.invariants().holds());
        let p = Distribution::new(vec![0.9, 0.0, 0.1]).unwrap();
        let scan = support_scan(&b, &trace, &p).unwrap();
        assert!((scan.argmax_tau[0] + 0.95).abs() < 1e-9);
        assert!((scan.max_value + 0.195).abs() < 1e-9);
    }

    #[test]
    fn lafferty_log_is_exponential_tilt() {
        let l = log_model(SampleSpace::indexed(3).unwrap(), BaseMeasure::counting(3)).unwrap();
        let t = Statistic::scalar(&[-1.0, 0.0, 1.0]).unwrap();
        let p0 = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        let fam = lafferty_family(&l, &p0, &t, &[vec![0.0], vec![1.0]]).unwrap();
        let at = |b: f64| {
            fam.rows
                .iter()
                .find(|r| (r.point.beta.as_ref().unwrap()[0] - b).abs() < 1e-6)
                .unwrap()
        };
        assert!(at(0.0).point.p_star.max_abs_diff(&p0) < 1e-6);
        let w: Vec<f64> = [0.5 * 1f64.exp(), 0.3, 0.2 * (-1f64).exp()].to_vec();
        let want = Distribution::normalized(w).unwrap();
        assert!(at(1.0).point.p_star.max_abs_diff(&want) < 1e-6);
    }
}
