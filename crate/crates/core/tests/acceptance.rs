//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use maxent_core::constraints::{vertices, GammaTau};
use maxent_core::derived::{blahut_arimoto, capacity_solve, StatModel};
use maxent_core::divergence::{
    discrepancy, equalizer_check, find_neutral, mixture_identities, pythagorean_check, relative_model,
};
use maxent_core::losses::{
    bregman_model, brier_model, check_proper, log_model, quadratic_model, zero_one_model, ConvexGenerator,
};
use maxent_core::maxent::{
    beta_derivative_check, conjugacy_check, solve, solve_brier, solve_log, solve_zero_one, specific_entropy,
    support_scan, trace_family,
};
use maxent_core::prob::{expected_loss, mixture};
use maxent_core::sampling::{random_distribution, seeded};
use maxent_core::verify::restricted_upper_value;
use maxent_core::{Act, BaseMeasure, Distribution, LossModel, SampleSpace, Statistic};
use rand::Rng;

type Check = Result<(), String>;

const T: [f64; 3] = [-1.0, 0.0, 1.0];

fn space() -> SampleSpace {
    SampleSpace::new(["-1", "0", "1"]).unwrap()
}

fn stat() -> Statistic {
    Statistic::scalar(&T).unwrap()
}

fn gamma(tau: f64) -> GammaTau {
    GammaTau::scalar(&T, tau).unwrap()
}

/// `from + i (to - from) / steps` for `i = 0..=steps`.
fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| from + i as f64 * (to - from) / steps as f64)
        .collect()
}

fn vgrid(from: f64, to: f64, steps: usize) -> Vec<Vec<f64>> {
    grid(from, to, steps).into_iter().map(|v| vec![v]).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn e<E: std::fmt::Debug>(err: E) -> String {
    format!("{err:?}")
}

// Brier closed forms for t = x on {-1, 0, 1}: (p, h, beta0, beta1).
fn brier_oracle(tau: f64) -> ([f64; 3], f64, f64, f64) {
    if tau <= -2.0 / 3.0 {
        (
            [-tau, 1.0 + tau, 0.0],
            -2.0 * tau * (1.0 + tau),
            2.0 * tau * tau,
            -2.0 - 4.0 * tau,
        )
    } else if tau < 2.0 / 3.0 {
        (
            [1.0 / 3.0 - tau / 2.0, 1.0 / 3.0, 1.0 / 3.0 + tau / 2.0],
            2.0 / 3.0 - tau * tau / 2.0,
            2.0 / 3.0 + tau * tau / 2.0,
            -tau,
        )
    } else {
        (
            [0.0, 1.0 - tau, tau],
            2.0 * tau * (1.0 - tau),
            2.0 * tau * tau,
            2.0 - 4.0 * tau,
        )
    }
}

fn criterion_1() -> Check {
    for tau in [-1.0, -0.8, -2.0 / 3.0, -0.25, 0.0, 0.5, 2.0 / 3.0, 0.9, 1.0] {
        let sp = solve_brier(&gamma(tau)).map_err(e)?;
        let beta0 = sp.beta0.ok_or(format!("tau={tau}: no beta0"))?;
        let beta1 = sp.beta.as_ref().ok_or(format!("tau={tau}: no beta"))?[0];
        if tau.abs() == 1.0 {
            // endpoint rows: beta0 = -tau beta1 with |beta1| >= 2 on the correct side
            let want_p = if tau < 0.0 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
            ensure(close_vec(sp.p_star.as_slice(), &want_p, 1e-9), || {
                format!("tau={tau}: p={:?}", sp.p_star)
            })?;
            ensure(sp.h_star.abs() <= 1e-9, || format!("tau={tau}: h={}", sp.h_star))?;
            ensure((beta0 + tau * beta1).abs() <= 1e-9, || {
                format!("tau={tau}: beta0={beta0} beta1={beta1}")
            })?;
            ensure(-tau * beta1 >= 2.0 - 1e-9, || format!("tau={tau}: beta1={beta1}"))?;
            continue;
        }
        let (p, h, b0, b1) = brier_oracle(tau);
        ensure(close_vec(sp.p_star.as_slice(), &p, 1e-9), || {
            format!("tau={tau}: p={:?} want {p:?}", sp.p_star)
        })?;
        ensure((sp.h_star - h).abs() <= 1e-9, || {
            format!("tau={tau}: h={} want {h}", sp.h_star)
        })?;
        ensure((beta0 - b0).abs() <= 1e-9, || {
            format!("tau={tau}: beta0={beta0} want {b0}")
        })?;
        ensure((beta1 - b1).abs() <= 1e-9, || {
            format!("tau={tau}: beta1={beta1} want {b1}")
        })?;
    }
    Ok(())
}

// Zero-one closed forms on 0 <= tau <= 1, mirrored for tau < 0.
fn zero_one_oracle(tau: f64) -> ([f64; 3], f64) {
    let s = tau.abs();
    let (p, h) = if s == 0.0 {
        ([1.0 / 3.0; 3], 2.0 / 3.0)
    } else if s < 0.5 {
        (
            [(1.0 - 2.0 * s) / 3.0, (1.0 + s) / 3.0, (1.0 + s) / 3.0],
            (2.0 - s) / 3.0,
        )
    } else {
        ([0.0, 1.0 - s, s], 1.0 - s)
    };
    if tau < 0.0 {
        ([p[2], p[1], p[0]], h)
    } else {
        (p, h)
    }
}

fn criterion_2() -> Check {
    for tau in [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0] {
        let sp = solve_zero_one(&gamma(tau)).map_err(e)?;
        let (p, h) = zero_one_oracle(tau);
        ensure(close_vec(sp.p_star.as_slice(), &p, 1e-9), || {
            format!("tau={tau}: p={:?} want {p:?}", sp.p_star)
        })?;
        ensure((sp.h_star - h).abs() <= 1e-9, || {
            format!("tau={tau}: h={} want {h}", sp.h_star)
        })?;
    }
    Ok(())
}

fn criterion_3() -> Check {
    let want = [0.0, 1.0 / 3.0, 2.0 / 3.0];
    for tau in grid(0.05, 0.45, 8) {
        let sp = solve_zero_one(&gamma(tau)).map_err(e)?;
        ensure(close_vec(&sp.zeta_star.payload, &want, 1e-9), || {
            format!("tau={tau}: zeta={:?}", sp.zeta_star.payload)
        })?;
        let b0 = sp.beta0.unwrap_or(f64::NAN);
        let b1 = sp.beta.as_ref().map_or(f64::NAN, |b| b[0]);
        ensure((b0 - 2.0 / 3.0).abs() <= 1e-9 && (b1 + 1.0 / 3.0).abs() <= 1e-9, || {
            format!("tau={tau}: beta0={b0} beta1={b1}")
        })?;
    }
    let sp = solve_zero_one(&gamma(0.5)).map_err(e)?;
    let fam = sp.diagnostics.family.clone().ok_or("tau=0.5: no act family reported")?;
    ensure(fam.ranges[0][1] <= 1e-9, || {
        format!("zeta(-1) range {:?}", fam.ranges[0])
    })?;
    ensure(fam.ranges[1][1] <= 1.0 / 3.0 + 1e-9, || {
        format!("zeta(0) range {:?}", fam.ranges[1])
    })?;
    // members are (0, a, 1 - a)
    ensure(
        (fam.ranges[2][0] - (1.0 - fam.ranges[1][1])).abs() <= 1e-9
            && (fam.ranges[2][1] - (1.0 - fam.ranges[1][0])).abs() <= 1e-9,
        || format!("zeta(1) range {:?} vs zeta(0) range {:?}", fam.ranges[2], fam.ranges[1]),
    )?;
    ensure(close_vec(&sp.zeta_star.payload, &want, 1e-9), || {
        format!("canonical act {:?}", sp.zeta_star.payload)
    })
}

fn criterion_4() -> Check {
    let b = brier_model(space());
    let trace = trace_family(&b, &stat(), &vgrid(-1.0, 1.0, 40)).map_err(e)?;
    let p = Distribution::new(vec![0.9, 0.0, 0.1]).map_err(e)?;
    let scan = support_scan(&b, &trace, &p).map_err(e)?;
    let at = |tau: f64| trace.rows.iter().position(|r| (r.tau[0] - tau).abs() < 1e-12).unwrap();
    let s08 = scan.values[at(-0.8)];
    ensure((s08 + 0.24).abs() <= 1e-9, || format!("s*(zeta_-0.8) = {s08}"))?;
    ensure((scan.max_value + 0.195).abs() <= 1e-9, || {
        format!("max s* = {}", scan.max_value)
    })?;
    ensure((scan.argmax_tau[0] + 0.95).abs() <= 1e-9, || {
        format!("argmax tau = {:?}", scan.argmax_tau)
    })?;
    let zeta = &trace.rows[scan.argmax].point.zeta_star.payload;
    ensure(close_vec(zeta, &[0.95, 0.05, 0.0], 1e-9), || {
        format!("zeta at argmax {zeta:?}")
    })
}

fn criterion_5() -> Check {
    let mu = BaseMeasure::counting(3);
    let sp = solve_log(&gamma(0.0), &mu).map_err(e)?;
    ensure((sp.h_star - 3f64.ln()).abs() <= 1e-12, || {
        format!("h(0) = {}", sp.h_star)
    })?;
    for tau in grid(-0.9, 0.9, 18) {
        let sp = solve_log(&gamma(tau), &mu).map_err(e)?;
        let m: f64 = sp.p_star.as_slice().iter().zip(&T).map(|(p, t)| p * t).sum();
        ensure((m - tau).abs() <= 1e-8, || format!("tau={tau}: E T = {m}"))?;
        let gn = sp.diagnostics.gradient_norm.unwrap_or(f64::INFINITY);
        ensure(gn <= 1e-10, || format!("tau={tau}: gradient norm {gn}"))?;
    }
    for tau in [-1.0, 1.0] {
        let sp = solve_log(&gamma(tau), &mu).map_err(e)?;
        ensure(sp.h_star == 0.0, || format!("h({tau}) = {}", sp.h_star))?;
    }
    Ok(())
}

fn models() -> Vec<Box<dyn LossModel>> {
    vec![
        Box::new(brier_model(space())),
        Box::new(log_model(space(), BaseMeasure::counting(3)).unwrap()),
        Box::new(zero_one_model(space())),
    ]
}

fn criterion_6() -> Check {
    let t = stat();
    for m in models() {
        let name = m.name().to_string();
        let trace = trace_family(m.as_ref(), &t, &vgrid(-1.0, 1.0, 200)).map_err(e)?;
        let inv = trace.invariants();
        ensure(inv.monotonicity_violation <= 1e-7, || {
            format!("{name}: monotonicity violation {}", inv.monotonicity_violation)
        })?;
        let rep = beta_derivative_check(m.as_ref(), &trace, 1e-5).map_err(e)?;
        ensure(rep.rows.len() >= 3, || {
            format!("{name}: only {} rows checked", rep.rows.len())
        })?;
        ensure(rep.max_error <= 1e-4, || {
            let w = rep.rows.iter().max_by(|a, b| a.error.total_cmp(&b.error)).unwrap();
            format!("{name}: derivative error {} at tau={}", w.error, w.tau)
        })?;

        let (betas, sigmas) = match name.as_str() {
            "brier" => (vgrid(-2.5, 2.5, 399), vgrid(-1.0, 1.0, 40)),
            "log" => (vgrid(-4.0, 4.0, 399), vgrid(-0.9, 0.9, 36)),
            _ => (vgrid(-2.0, 2.0, 399), vgrid(-1.0, 1.0, 40)),
        };
        let rep = conjugacy_check(m.as_ref(), &t, &sigmas, &betas).map_err(e)?;
        ensure(rep.max_grid_residual <= 1e-3, || {
            format!("{name}: grid residual {}", rep.max_grid_residual)
        })?;
        ensure(rep.max_matched_residual <= 1e-8, || {
            format!("{name}: matched residual {}", rep.max_matched_residual)
        })?;
        ensure(rep.max_fenchel_violation <= 1e-8, || {
            format!("{name}: Fenchel violation {}", rep.max_fenchel_violation)
        })?;
    }
    Ok(())
}

fn criterion_7() -> Check {
    for m in models() {
        let name = m.name().to_string();
        let zeta0 = find_neutral(m.as_ref()).ok_or(format!("{name}: no neutral act"))?;
        for tau in grid(-1.0, 1.0, 40) {
            let g = gamma(tau);
            let sp = solve(m.as_ref(), &g).map_err(e)?;
            let vs = vertices(&g).map_err(e)?;
            let rep = pythagorean_check(m.as_ref(), &vs.vertices, &sp.p_star, &sp.zeta_star, &zeta0).map_err(e)?;
            let eq = equalizer_check(m.as_ref(), &vs.vertices, &sp.zeta_star).map_err(e)?;
            ensure(rep.holds(), || format!("{name} tau={tau}: min slack {}", rep.min_slack))?;
            ensure(rep.equality == eq.is_equalizer, || {
                format!(
                    "{name} tau={tau}: equality {} vs equalizer {}",
                    rep.equality, eq.is_equalizer
                )
            })?;
            if name == "brier" && tau.abs() <= 2.0 / 3.0 + 1e-12 {
                ensure(rep.equality, || format!("brier tau={tau}: slacks {:?}", rep.slacks))?;
            }
        }
    }
    let b = brier_model(space());
    let zeta0 = find_neutral(&b).unwrap();
    for tau in [0.75, 0.9] {
        let g = gamma(tau);
        let sp = solve_brier(&g).map_err(e)?;
        let vs = vertices(&g).map_err(e)?;
        let rep = pythagorean_check(&b, &vs.vertices, &sp.p_star, &sp.zeta_star, &zeta0).map_err(e)?;
        ensure(rep.max_slack >= 1e-3, || {
            format!("brier tau={tau}: max slack {}", rep.max_slack)
        })?;
    }
    Ok(())
}

fn criterion_8() -> Check {
    let models: Vec<Box<dyn LossModel>> = vec![Box::new(zero_one_model(space())), Box::new(brier_model(space()))];
    for m in models {
        for tau in grid(-1.0, 1.0, 40) {
            let up = restricted_upper_value(m.as_ref(), &gamma(tau)).map_err(e)?;
            let h = specific_entropy(m.as_ref(), &stat(), &[tau]).map_err(e)?;
            ensure((up.value - h).abs() <= 1e-7, || {
                format!("{} tau={tau}: upper {} vs h {h}", m.name(), up.value)
            })?;
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    let closed = 2f64.ln() - (0.1 * 10f64.ln() + 0.9 * (10.0f64 / 9.0).ln());
    let l2 = log_model(SampleSpace::indexed(2).unwrap(), BaseMeasure::counting(2)).unwrap();
    let sm = StatModel::new(
        &l2,
        vec![
            Distribution::new(vec![0.9, 0.1]).unwrap(),
            Distribution::new(vec![0.1, 0.9]).unwrap(),
        ],
    )
    .map_err(e)?;
    let r = capacity_solve(&sm, 1e-12, 100_000).map_err(e)?;
    ensure((r.i_star - closed).abs() <= 1e-6, || {
        format!("I* = {} vs {closed}", r.i_star)
    })?;
    ensure((r.i_star - 0.368064).abs() <= 1e-6, || format!("I* = {}", r.i_star))?;
    ensure(close_vec(r.pi_star.as_slice(), &[0.5, 0.5], 1e-4), || {
        format!("pi* = {:?}", r.pi_star)
    })?;
    ensure(r.upsilon_mass() >= 1.0 - 1e-6, || {
        format!("upsilon mass {}", r.upsilon_mass())
    })?;

    let mut rng = seeded(9);
    for case in 0..50 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(2..=6);
        let lm = log_model(SampleSpace::indexed(n).unwrap(), BaseMeasure::counting(n)).unwrap();
        let omegas = (0..m).map(|_| random_distribution(&mut rng, n)).collect();
        let sm = StatModel::new(&lm, omegas).map_err(e)?;
        let a = capacity_solve(&sm, 1e-12, 100_000).map_err(e)?;
        let b = blahut_arimoto(&sm, 1e-11, 10_000_000).map_err(e)?;
        ensure((a.i_star - b.i_star).abs() <= 1e-6, || {
            format!("case {case}: {} vs {}", a.i_star, b.i_star)
        })?;
        for r in [&a, &b] {
            ensure(r.upsilon_mass() >= 1.0 - 1e-6, || {
                format!("case {case}: upsilon mass {}", r.upsilon_mass())
            })?;
        }
    }
    Ok(())
}

const CASES: usize = 1000;

fn criterion_10() -> Check {
    let s3 = space();
    let bregman_models = [
        bregman_model(s3.clone(), BaseMeasure::counting(3), ConvexGenerator::entropy()).unwrap(),
        bregman_model(s3.clone(), BaseMeasure::counting(3), ConvexGenerator::square(1.0 / 3.0)).unwrap(),
        bregman_model(
            s3.clone(),
            BaseMeasure::new(vec![0.5, 1.0, 2.0]).unwrap(),
            ConvexGenerator::power(1.5).unwrap(),
        )
        .unwrap(),
    ];
    let mut all: Vec<Box<dyn LossModel>> = models();
    all.push(Box::new(quadratic_model(s3.clone(), T.to_vec()).unwrap()));
    let proper: Vec<&dyn LossModel> = vec![
        all[0].as_ref(),
        all[1].as_ref(),
        &bregman_models[0],
        &bregman_models[1],
        &bregman_models[2],
    ];

    let mut rng = seeded(10);
    // entropy concavity, discrepancy nonnegativity / Bayes zero, mixture linearity
    for m in all
        .iter()
        .map(|b| b.as_ref())
        .chain(bregman_models.iter().map(|b| b as &dyn LossModel))
    {
        let name = m.name().to_string();
        for _ in 0..CASES {
            let p0 = random_distribution(&mut rng, 3);
            let p1 = random_distribution(&mut rng, 3);
            let lam: f64 = rng.gen();
            let pm = mixture(&p0, &p1, lam).map_err(e)?;
            let (h0, h1, hm) = (
                m.entropy(&p0).map_err(e)?,
                m.entropy(&p1).map_err(e)?,
                m.entropy(&pm).map_err(e)?,
            );
            ensure(hm >= (1.0 - lam) * h0 + lam * h1 - 1e-9, || {
                format!("{name}: concavity fails")
            })?;

            let a = m.bayes_act(&p1).map_err(e)?.act;
            let d = discrepancy(&p0, &a, m).map_err(e)?.to_f64();
            ensure(d >= -1e-9, || format!("{name}: negative discrepancy {d}"))?;
            let own = m.bayes_act(&p0).map_err(e)?.act;
            let d0 = discrepancy(&p0, &own, m).map_err(e)?.to_f64();
            ensure(d0.abs() <= 1e-9, || format!("{name}: D(P, zeta_P) = {d0}"))?;

            let lm = expected_loss(&pm, &a, m).map_err(e)?.to_f64();
            let l0 = expected_loss(&p0, &a, m).map_err(e)?.to_f64();
            let l1 = expected_loss(&p1, &a, m).map_err(e)?.to_f64();
            ensure((lm - ((1.0 - lam) * l0 + lam * l1)).abs() <= 1e-9, || {
                format!("{name}: expected loss not linear")
            })?;
        }
    }
    // propriety margins
    for (i, m) in proper.iter().enumerate() {
        let r = check_proper(*m, CASES, i as u64).map_err(e)?;
        ensure(r.min_margin >= -1e-9, || {
            format!("{}: margin {}", m.name(), r.min_margin)
        })?;
    }
    // mixture identities
    for m in &proper {
        for _ in 0..CASES {
            let k = rng.gen_range(1..=4);
            let comps: Vec<Distribution> = (0..k).map(|_| random_distribution(&mut rng, 3)).collect();
            let w = random_distribution(&mut rng, k);
            let q = random_distribution(&mut rng, 3);
            let r = mixture_identities(*m, &comps, w.as_slice(), &q).map_err(e)?;
            ensure(r.entropy_identity <= 1e-9 && r.divergence_identity <= 1e-9, || {
                format!("{}: residuals {r:?}", m.name())
            })?;
        }
    }
    // relative-model Bayes invariance
    for m in all.iter().map(|b| b.as_ref()) {
        for _ in 0..CASES {
            let r = random_distribution(&mut rng, 3);
            let zeta0 = m.bayes_act(&r).map_err(e)?.act;
            let rel = match relative_model(m, zeta0) {
                Ok(rel) => rel,
                Err(_) => continue,
            };
            let p = random_distribution(&mut rng, 3);
            let bayes = m.bayes_act(&p).map_err(e)?.act;
            let l = expected_loss(&p, &bayes, &rel).map_err(e)?.to_f64();
            let h0 = rel.entropy(&p).map_err(e)?;
            ensure((l - h0).abs() <= 1e-9, || {
                format!("{}: relative Bayes gap {}", m.name(), l - h0)
            })?;
            ensure(h0 <= 1e-9, || format!("{}: H0 = {h0}", m.name()))?;
        }
    }
    // Bregman specializations
    let log = log_model(s3.clone(), BaseMeasure::counting(3)).unwrap();
    let brier = brier_model(s3);
    for _ in 0..CASES {
        let q = random_distribution(&mut rng, 3);
        let a = Act::density(q.as_slice().to_vec());
        let lb = bregman_models[0].loss_vector(&a).map_err(e)?;
        let ll = log.loss_vector(&a).map_err(e)?;
        ensure(
            lb.iter().zip(&ll).all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= 1e-9),
            || "log specialization".into(),
        )?;
        let sb = bregman_models[1].loss_vector(&a).map_err(e)?;
        let sq = brier.loss_vector(&Act::distribution(&q)).map_err(e)?;
        ensure(
            sb.iter().zip(&sq).all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= 1e-9),
            || "Brier specialization".into(),
        )?;
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Brier closed-form maximum entropy rows", criterion_1),
        ("zero-one maximum entropy rows", criterion_2),
        ("zero-one robust act reconstruction", criterion_3),
        ("Brier support scan counterexample", criterion_4),
        ("log-score family and boundary", criterion_5),
        ("duality suite", criterion_6),
        ("Pythagorean suite", criterion_7),
        ("cross-oracle game values", criterion_8),
        ("capacity", criterion_9),
        ("property suites", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
