//! Verification suites run over a spec's grid, each producing a JSON report.

use clap::ValueEnum;
use maxent_core::constraints::vertices;
use maxent_core::divergence::{discrepancy, div, equalizer_check, find_neutral, mixture_identities, pythagorean_check};
use maxent_core::maxent::conjugacy_check;
use maxent_core::prob::mixture_of;
use maxent_core::sampling::{random_distribution, seeded};
use maxent_core::verify::{u_set_check, verify_saddle};
use maxent_core::{Distribution, Error};
use serde::Serialize;
use serde_json::{json, Value};

use crate::problem::Problem;
use crate::record::error_code;

/// Random members of `Gamma_tau` added to its vertices as Pythagorean test points.
const RANDOM_MEMBERS: usize = 20;
/// Random cases drawn by the identities suite.
const IDENTITY_CASES: usize = 100;
const IDENTITY_TOL: f64 = 1e-9;
/// Allowed `|h - grid transform|` in the conjugacy suite.
pub const CONJUGACY_TOL: f64 = 1e-3;
/// Allowed positive part of `h(tau) - beta tau - chi(beta)`.
pub const FENCHEL_TOL: f64 = 1e-6;
/// Points per axis of the default beta grid.
const BETA_POINTS: usize = 401;
const BETA_POINTS_MULTI: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Saddle,
    Pythagorean,
    Equalizer,
    Conjugacy,
    Identities,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub model: String,
    pub seed: u64,
    pub passed: bool,
    pub summary: Value,
    /// First failing row, if any.
    pub witness: Option<Value>,
    pub rows: Vec<Value>,
}

struct Rows {
    rows: Vec<Value>,
    witness: Option<Value>,
}

impl Rows {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            witness: None,
        }
    }

    fn push(&mut self, row: Value, ok: bool) {
        if !ok && self.witness.is_none() {
            self.witness = Some(row.clone());
        }
        self.rows.push(row);
    }

    fn failed(&mut self, tau: &[f64], e: &Error) {
        self.push(
            json!({"tau": tau, "passed": false, "error": error_code(e), "message": e.to_string()}),
            false,
        );
    }
}

pub fn run(
    suite: Suite,
    pb: &Problem,
    taus: &[Vec<f64>],
    beta_grid: Option<Vec<Vec<f64>>>,
    seed: u64,
) -> anyhow::Result<SuiteReport> {
    let mut rows = Rows::new();
    let summary = match suite {
        Suite::Saddle => saddle(pb, taus, &mut rows),
        Suite::Pythagorean => pythagorean(pb, taus, seed, &mut rows)?,
        Suite::Equalizer => equalizer(pb, taus, &mut rows),
        Suite::Conjugacy => conjugacy(pb, taus, beta_grid, &mut rows)?,
        Suite::Identities => identities(pb, seed, &mut rows)?,
    };
    Ok(SuiteReport {
        suite,
        model: pb.model.name().to_string(),
        seed,
        passed: rows.witness.is_none(),
        summary,
        witness: rows.witness,
        rows: rows.rows,
    })
}

fn saddle(pb: &Problem, taus: &[Vec<f64>], rows: &mut Rows) -> Value {
    let mut verified = 0;
    for tau in taus {
        let res = pb.solve(tau).and_then(|sp| {
            let g = pb.gamma(tau)?;
            pb.with_game(|m| {
                let rep = verify_saddle(m, &g, &sp.p_star, &sp.zeta_star)?;
                let u = u_set_check(m, &g, &sp.zeta_star, sp.h_star, &sp.p_star)?;
                Ok((sp, rep, u))
            })
        });
        match res {
            Ok((sp, rep, u)) => {
                let ok = rep.passed && (!u.applicable || u.supported);
                verified += usize::from(ok);
                rows.push(
                    json!({"tau": tau, "h": sp.h_star, "passed": ok, "report": rep, "u_set": u}),
                    ok,
                );
            }
            Err(e) => rows.failed(tau, &e),
        }
    }
    json!({"rows": taus.len(), "verified": verified})
}

fn pythagorean(pb: &Problem, taus: &[Vec<f64>], seed: u64, rows: &mut Rows) -> anyhow::Result<Value> {
    let model = pb.model.as_ref();
    let (zeta0, neutral) = match &pb.reference {
        Some(a) => (a.clone(), false),
        None => (
            find_neutral(model).ok_or_else(|| Error::Unsupported {
                model: model.name().to_string(),
                what: "no neutral act; give a reference in the spec".into(),
            })?,
            true,
        ),
    };
    let mut rng = seeded(seed);
    let mut equality = Regions::new();
    for tau in taus {
        let res = (|| {
            let g = pb.gamma(tau)?;
            // losses relative to a neutral act differ from the base losses by
            // a constant, so the base game has the same saddle points
            let sp = pb.solve(tau)?;
            let vs = vertices(&g)?;
            let degenerate = vs.len() == 1;
            let mut points = vs.vertices.clone();
            for _ in 0..RANDOM_MEMBERS {
                let w = random_distribution(&mut rng, vs.len());
                points.push(mixture_of(&vs.vertices, w.as_slice())?);
            }
            Ok((
                pythagorean_check(model, &points, &sp.p_star, &sp.zeta_star, &zeta0)?,
                degenerate,
            ))
        })();
        match res {
            Ok((rep, degenerate)) => {
                equality.push(tau, rep.equality, degenerate);
                let ok = rep.holds();
                rows.push(
                    json!({"tau": tau, "passed": ok, "min_slack": rep.min_slack, "max_slack": rep.max_slack, "equality": rep.equality}),
                    ok,
                );
            }
            Err(e) => rows.failed(tau, &e),
        }
    }
    Ok(json!({
        "reference": zeta0,
        "neutral_reference": neutral,
        "equality_regions": equality.to_json(),
        "equality_taus": equality.count,
    }))
}

/// Maximal runs of consecutive grid rows where a property holds. Rows whose
/// constraint set is a single point hold trivially and are skipped.
struct Regions {
    runs: Vec<(Vec<f64>, Vec<f64>)>,
    open: bool,
    count: usize,
}

impl Regions {
    fn new() -> Self {
        Self {
            runs: Vec::new(),
            open: false,
            count: 0,
        }
    }

    fn push(&mut self, tau: &[f64], holds: bool, degenerate: bool) {
        if degenerate {
            return;
        }
        if !holds {
            self.open = false;
            return;
        }
        self.count += 1;
        match self.runs.last_mut() {
            Some(run) if self.open => run.1 = tau.to_vec(),
            _ => self.runs.push((tau.to_vec(), tau.to_vec())),
        }
        self.open = true;
    }

    fn to_json(&self) -> Value {
        Value::Array(self.runs.iter().map(|(a, b)| json!({"from": a, "to": b})).collect())
    }
}

fn equalizer(pb: &Problem, taus: &[Vec<f64>], rows: &mut Rows) -> Value {
    let mut equalizers = Regions::new();
    for tau in taus {
        let res = pb.solve(tau).and_then(|sp| {
            let vs = vertices(&pb.gamma(tau)?)?;
            let rep = pb.with_game(|m| equalizer_check(m, &vs.vertices, &sp.zeta_star))?;
            Ok((rep, sp, vs.len() == 1))
        });
        match res {
            Ok((rep, sp, degenerate)) => {
                // an act whose loss is affine in t has the same expected loss
                // everywhere on Gamma_tau
                let ok = (!sp.flags.is_linear || rep.is_equalizer) && rep.is_equalizer == sp.flags.is_equalizer;
                equalizers.push(tau, rep.is_equalizer, degenerate);
                rows.push(
                    json!({"tau": tau, "passed": ok, "is_equalizer": rep.is_equalizer, "spread": rep.spread, "is_linear": sp.flags.is_linear}),
                    ok,
                );
            }
            Err(e) => rows.failed(tau, &e),
        }
    }
    json!({"equalizer_regions": equalizers.to_json(), "equalizer_taus": equalizers.count})
}

fn conjugacy(
    pb: &Problem,
    taus: &[Vec<f64>],
    beta_grid: Option<Vec<Vec<f64>>>,
    rows: &mut Rows,
) -> anyhow::Result<Value> {
    let betas = match beta_grid {
        Some(b) => b,
        None => default_beta_grid(pb, taus),
    };
    let rep = pb.with_game(|m| conjugacy_check(m, &pb.statistic, taus, &betas))?;
    for (tau, h, transform) in &rep.rows {
        let residual = (h - transform).abs();
        let ok = residual <= CONJUGACY_TOL;
        rows.push(
            json!({"tau": tau, "h": h, "transform": transform, "residual": residual, "passed": ok}),
            ok,
        );
    }
    let fenchel_ok = rep.max_fenchel_violation <= FENCHEL_TOL;
    if !fenchel_ok {
        rows.push(
            json!({"passed": false, "max_fenchel_violation": rep.max_fenchel_violation}),
            false,
        );
    }
    Ok(json!({
        "beta_points": betas.len(),
        "max_grid_residual": rep.max_grid_residual,
        "max_fenchel_violation": rep.max_fenchel_violation,
        "max_matched_residual": rep.max_matched_residual,
        "tolerance": CONJUGACY_TOL,
    }))
}

/// Box around the betas of the regular grid rows, widened by a quarter of its
/// span (at least 1) on each side. For one constraint the rows' own betas are
/// added, so the transform is exact wherever `h` is piecewise linear.
fn default_beta_grid(pb: &Problem, taus: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = pb.statistic.k();
    let betas: Vec<Vec<f64>> = taus.iter().filter_map(|t| pb.solve(t).ok()?.beta).collect();
    let axes: Vec<(f64, f64)> = (0..k)
        .map(|j| {
            let lo = betas.iter().map(|b| b[j]).fold(f64::INFINITY, f64::min);
            let hi = betas.iter().map(|b| b[j]).fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() && hi.is_finite() {
                let pad = (0.25 * (hi - lo)).max(1.0);
                (lo - pad, hi + pad)
            } else {
                (-4.0, 4.0)
            }
        })
        .collect();
    let per_axis = if k == 1 { BETA_POINTS } else { BETA_POINTS_MULTI };
    let mut grid = vec![Vec::new()];
    for (lo, hi) in axes {
        let ticks: Vec<f64> = (0..per_axis)
            .map(|i| lo + (hi - lo) * i as f64 / (per_axis - 1) as f64)
            .collect();
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                ticks.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    if k == 1 {
        grid.extend(betas);
        grid.sort_by(|a, b| a[0].total_cmp(&b[0]));
        grid.dedup_by(|a, b| a[0] == b[0]);
    }
    grid
}

fn identities(pb: &Problem, seed: u64, rows: &mut Rows) -> anyhow::Result<Value> {
    let model = pb.model.as_ref();
    let n = pb.statistic.n();
    let mut rng = seeded(seed);
    // components and quotes are kept interior so every model quotes finite losses
    let mut draw = |len: usize, interior: bool| -> anyhow::Result<Distribution> {
        let p = random_distribution(&mut rng, len);
        if !interior {
            return Ok(p);
        }
        let w = p.as_slice().iter().map(|v| 0.9 * v + 0.1 / len as f64).collect();
        Ok(Distribution::normalized(w)?)
    };
    let mut worst = 0.0f64;
    for case in 0..IDENTITY_CASES {
        let components = (0..3).map(|_| draw(n, true)).collect::<anyhow::Result<Vec<_>>>()?;
        let weights = draw(3, false)?;
        let q = draw(n, true)?;
        let p = mixture_of(&components, weights.as_slice())?;
        let res = (|| {
            let m = mixture_identities(model, &components, weights.as_slice(), &q)?;
            let self_div = div(&p, &p, model)?.to_f64().abs();
            let d = discrepancy(&p, &model.bayes_act(&q)?.act, model)?.to_f64();
            Ok::<_, Error>((m, self_div, d))
        })();
        match res {
            Ok((m, self_div, d)) => {
                let residual = m.entropy_identity.max(m.divergence_identity).max(self_div);
                worst = worst.max(residual);
                let ok = residual <= IDENTITY_TOL && d >= -IDENTITY_TOL;
                rows.push(
                    json!({"case": case, "passed": ok, "entropy_identity": m.entropy_identity,
                           "divergence_identity": m.divergence_identity, "self_divergence": self_div,
                           "discrepancy": d}),
                    ok,
                );
            }
            Err(e) => rows.push(
                json!({"case": case, "passed": false, "error": error_code(&e), "message": e.to_string()}),
                false,
            ),
        }
    }
    Ok(json!({"cases": IDENTITY_CASES, "max_residual": worst, "tolerance": IDENTITY_TOL}))
}
