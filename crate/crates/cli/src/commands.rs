//! Subcommand bodies.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use maxent_core::derived::{blahut_arimoto, capacity_solve, equalization_report, StatModel};
use maxent_core::maxent::SaddlePoint;
use serde_json::json;

use crate::problem::{CmdResult, Failure, OrExit, Problem, EXIT_INFEASIBLE, EXIT_PARSE, EXIT_SADDLE, EXIT_SUITE};
use crate::record::{Layout, SCHEMA};
use crate::spec::{parse_vec, GridSpec, ProblemSpec};
use crate::suites::{self, Suite};
use crate::{grid_arg, Common};

pub const CAPACITY_TOL: f64 = 1e-12;
const CAPACITY_MAX_ITER: usize = 1_000_000;

fn load(common: &Common, tol: Option<f64>) -> CmdResult<Problem> {
    let spec = ProblemSpec::from_path(&common.spec).or_exit(EXIT_PARSE)?;
    Problem::new(spec, tol).classified()
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .or_exit(EXIT_PARSE),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).or_exit(EXIT_PARSE)
        }
    }
}

fn to_json(v: &impl serde::Serialize) -> CmdResult<String> {
    let mut s = serde_json::to_string_pretty(v).or_exit(EXIT_PARSE)?;
    s.push('\n');
    Ok(s)
}

fn scaled(sp: &SaddlePoint, scale: f64) -> SaddlePoint {
    let mut sp = sp.clone();
    sp.h_star *= scale;
    sp.beta0 = sp.beta0.map(|b| b * scale);
    if let Some(b) = sp.beta.as_mut() {
        b.iter_mut().for_each(|v| *v *= scale);
    }
    sp.diagnostics.bayes_margin *= scale;
    sp.diagnostics.vertex_margin *= scale;
    sp.diagnostics.gap *= scale;
    sp
}

fn units(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

pub fn solve(common: &Common, tau: Option<&str>, tol: Option<f64>) -> CmdResult {
    let pb = load(common, tol)?;
    let tau = match tau {
        Some(t) => Some(parse_vec(t).or_exit(EXIT_PARSE)?),
        None => None,
    };
    let tau = pb.spec.single_tau(tau.as_deref()).or_exit(EXIT_PARSE)?;
    let sp = pb.solve(&tau).classified()?;
    let record = json!({
        "model": pb.model.name(),
        "outcomes": pb.spec.outcomes,
        "units": units(common.bits),
        "relative": pb.reference.is_some(),
        "saddle_point": scaled(&sp, Problem::scale(common.bits)),
    });
    emit(common.out.as_deref(), &to_json(&record)?)?;
    if sp.diagnostics.verified {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_SADDLE,
            anyhow!(
                "saddle point not verified (bayes margin {:e}, vertex margin {:e})",
                sp.diagnostics.bayes_margin,
                sp.diagnostics.vertex_margin
            ),
        ))
    }
}

/// Rows are solved on worker threads and written in grid order. The command
/// succeeds when at least one row solves; failed rows become sentinels.
pub fn sweep(common: &Common, grid: &Option<String>, tol: Option<f64>) -> CmdResult {
    let pb = load(common, tol)?;
    let grid = grid_arg(grid).or_exit(EXIT_PARSE)?;
    let taus = pb.spec.tau_grid(grid.as_ref()).or_exit(EXIT_PARSE)?;
    let results = solve_all(&pb, &taus);
    let layout = Layout {
        k: pb.statistic.k(),
        n: pb.statistic.n(),
        act_dim: pb.model.act_dim(),
    };
    let scale = Problem::scale(common.bits);
    let mut text = format!("{SCHEMA}\n{}\n", layout.header());
    for (tau, res) in taus.iter().zip(&results) {
        match res {
            Ok(sp) => text += &layout.row(sp, scale),
            Err(e) => text += &layout.sentinel(tau, e),
        }
        text.push('\n');
    }
    if let Some(Err(e)) = results.first().filter(|_| results.iter().all(Result::is_err)) {
        return Err(Failure::classify(
            anyhow!(e.clone()).context("no grid point could be solved"),
        ));
    }
    emit(common.out.as_deref(), &text)
}

fn solve_all(pb: &Problem, taus: &[Vec<f64>]) -> Vec<Result<SaddlePoint, maxent_core::Error>> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(taus.len().max(1));
    let chunk = taus.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = taus
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|t| pb.solve(t)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

pub fn verify(
    common: &Common,
    suite: Suite,
    grid: &Option<String>,
    beta_grid: &Option<String>,
    tol: Option<f64>,
) -> CmdResult {
    let pb = load(common, tol)?;
    let grid = grid_arg(grid).or_exit(EXIT_PARSE)?;
    let taus = pb.spec.tau_grid(grid.as_ref()).or_exit(EXIT_PARSE)?;
    let betas = match beta_grid {
        Some(s) => Some(GridSpec::parse(s).and_then(|g| g.points()).or_exit(EXIT_PARSE)?),
        None => None,
    };
    let report = suites::run(suite, &pb, &taus, betas, common.seed).or_exit(EXIT_SUITE)?;
    emit(common.out.as_deref(), &to_json(&report)?)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_SUITE,
            anyhow!(
                "suite {suite:?} failed; witness: {}",
                report.witness.unwrap_or_default()
            ),
        ))
    }
}

pub fn capacity(common: &Common, tol: f64) -> CmdResult {
    let pb = load(common, None)?;
    let members = pb.spec.members().classified()?;
    if members.is_empty() {
        return Err(Failure::new(EXIT_INFEASIBLE, anyhow!("spec has no model members")));
    }
    let sm = StatModel::new(pb.model.as_ref(), members).classified()?;
    let res = capacity_solve(&sm, tol, CAPACITY_MAX_ITER).classified()?;
    let eq = equalization_report(&res, &sm).classified()?;
    let scale = Problem::scale(common.bits);
    let cross_check = if pb.spec.is_log() {
        let ba = blahut_arimoto(&sm, tol.max(1e-11), CAPACITY_MAX_ITER).classified()?;
        Some(json!({
            "i_star": ba.i_star * scale,
            "iterations": ba.iterations,
            "delta": (ba.i_star - res.i_star).abs() * scale,
        }))
    } else {
        None
    };
    let record = json!({
        "model": pb.model.name(),
        "units": units(common.bits),
        "members": sm.len(),
        "i_star": res.i_star * scale,
        "pi_star": res.pi_star,
        "act_star": res.act_star,
        "upsilon": res.upsilon,
        "upsilon_mass": res.upsilon_mass(),
        "derived_losses": res.derived_losses.iter().map(|v| v * scale).collect::<Vec<_>>(),
        "iterations": res.iterations,
        "gap": res.gap * scale,
        "equalization": {
            "spread_on_upsilon": eq.spread_on_upsilon * scale,
            "constant_on_upsilon": eq.constant_on_upsilon,
            "is_equalizer": eq.is_equalizer,
        },
        "blahut_arimoto": cross_check,
    });
    emit(common.out.as_deref(), &to_json(&record)?)
}
