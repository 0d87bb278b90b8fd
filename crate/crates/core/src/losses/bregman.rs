use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::prob::{check_len, Act, ActKind, BaseMeasure, Distribution, SampleSpace};

use super::{check_act, check_density, BayesAct, LossModel, ModelFamily, Strictness};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex `psi` on `[0, inf)` with its derivative.
///
/// `psi(0)` must be finite; `psi_prime(0)` may be `-inf`.
#[derive(Clone)]
pub struct ConvexGenerator {
    name: String,
    psi: RealFn,
    psi_prime: RealFn,
    strictly_convex: bool,
}

impl fmt::Debug for ConvexGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexGenerator")
            .field("name", &self.name)
            .field("strictly_convex", &self.strictly_convex)
            .finish()
    }
}

const GRID: usize = 1000;

impl ConvexGenerator {
    /// Wraps user functions after a numerical convexity and derivative check
    /// on a 1000-point grid in `(0, 1)`.
    pub fn new(
        name: impl Into<String>,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        strictly_convex: bool,
    ) -> Result<Self> {
        let gen = Self {
            name: name.into(),
            psi: Arc::new(psi),
            psi_prime: Arc::new(psi_prime),
            strictly_convex,
        };
        gen.validate()?;
        Ok(gen)
    }

    /// `psi(s) = s log s`, reproducing the logarithmic score.
    pub fn entropy() -> Self {
        Self::new(
            "s_log_s",
            |s| if s > 0.0 { s * s.ln() } else { 0.0 },
            |s| if s > 0.0 { s.ln() + 1.0 } else { f64::NEG_INFINITY },
            true,
        )
        .expect("s log s is convex")
    }

    /// `psi(s) = s^2 - offset`; `offset = 1/N` with counting measure gives Brier.
    pub fn square(offset: f64) -> Self {
        Self::new("square", move |s| s * s - offset, |s| 2.0 * s, true).expect("s^2 is convex")
    }

    /// `psi(s) = s^alpha` for `alpha > 1`.
    pub fn power(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 1.0 {
            return Err(Error::InvalidGenerator(format!("power needs alpha > 1, got {alpha}")));
        }
        Self::new(
            format!("power:{alpha}"),
            move |s| s.powf(alpha),
            move |s| alpha * s.powf(alpha - 1.0),
            true,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn psi(&self, s: f64) -> f64 {
        (self.psi)(s)
    }

    pub fn psi_prime(&self, s: f64) -> f64 {
        (self.psi_prime)(s)
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    /// `psi(a) - psi(b) - psi'(b)(a - b)`.
    pub fn delta(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let d = self.psi_prime(b);
        if d.is_infinite() {
            return f64::INFINITY;
        }
        self.psi(a) - self.psi(b) - d * (a - b)
    }

    fn validate(&self) -> Result<()> {
        if !self.psi(0.0).is_finite() {
            return Err(Error::InvalidGenerator(format!("{}: psi(0) is not finite", self.name)));
        }
        let h = 1.0 / (GRID + 1) as f64;
        let vals: Vec<f64> = (0..=GRID + 1).map(|i| self.psi(i as f64 * h)).collect();
        for i in 1..=GRID {
            let second = vals[i + 1] - 2.0 * vals[i] + vals[i - 1];
            if second.is_nan() || second < -1e-8 {
                return Err(Error::InvalidGenerator(format!(
                    "{}: not convex near s = {}",
                    self.name,
                    i as f64 * h
                )));
            }
            let s = i as f64 * h;
            let step = 1e-3 * s.min(1.0 - s);
            let fd = (self.psi(s + step) - self.psi(s - step)) / (2.0 * step);
            let d = self.psi_prime(s);
            let err = (fd - d).abs();
            if err.is_nan() || err > 1e-6 * d.abs().max(1.0) {
                return Err(Error::InvalidGenerator(format!(
                    "{}: psi' = {d} disagrees with finite difference {fd} at s = {s}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Separable Bregman score
/// `S(x, q) = -psi'(q(x)) - sum_t [psi(q(t)) - q(t) psi'(q(t))] mu(t)`.
#[derive(Debug, Clone)]
pub struct BregmanModel {
    space: SampleSpace,
    mu: BaseMeasure,
    gen: ConvexGenerator,
}

pub fn bregman_model(space: SampleSpace, mu: BaseMeasure, gen: ConvexGenerator) -> Result<BregmanModel> {
    check_len(space.len(), mu.len())?;
    Ok(BregmanModel { space, mu, gen })
}

impl BregmanModel {
    pub fn generator(&self) -> &ConvexGenerator {
        &self.gen
    }

    pub fn base_measure(&self) -> &BaseMeasure {
        &self.mu
    }

    fn density(&self, p: &Distribution) -> Vec<f64> {
        p.as_slice().iter().zip(self.mu.masses()).map(|(a, m)| a / m).collect()
    }
}

impl LossModel for BregmanModel {
    fn name(&self) -> &str {
        "bregman"
    }

    fn space(&self) -> &SampleSpace {
        &self.space
    }

    fn act_kind(&self) -> ActKind {
        ActKind::Density
    }

    fn strictness(&self) -> Strictness {
        if self.gen.strictly_convex {
            Strictness::Strict
        } else {
            Strictness::None
        }
    }

    fn family(&self) -> ModelFamily {
        ModelFamily::Bregman
    }

    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
        check_act(self, act)?;
        check_density(&act.payload, &self.mu)?;
        let q = &act.payload;
        // 0 * psi'(0) = 0 even when psi'(0) = -inf
        let common: f64 = q
            .iter()
            .zip(self.mu.masses())
            .map(|(&qt, m)| {
                let term = if qt > 0.0 {
                    self.gen.psi(qt) - qt * self.gen.psi_prime(qt)
                } else {
                    self.gen.psi(0.0)
                };
                term * m
            })
            .sum();
        Ok(q.iter()
            .map(|&qx| ExtReal::from_f64(-self.gen.psi_prime(qx) - common))
            .collect())
    }

    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct> {
        check_len(self.space.len(), p.len())?;
        let q = self.density(p);
        let entropy = -q
            .iter()
            .zip(self.mu.masses())
            .map(|(&qt, m)| self.gen.psi(qt) * m)
            .sum::<f64>();
        Ok(BayesAct {
            act: Act::density(q),
            entropy,
        })
    }

    fn quote(&self, q: &Distribution) -> Option<Act> {
        Some(Act::density(self.density(q)))
    }
}

/// `d_psi(P, Q) = sum_t Delta_psi(p(t), q(t)) mu(t)` computed directly from the
/// generator.
pub fn bregman_divergence(model: &BregmanModel, p: &Distribution, q: &Distribution) -> Result<f64> {
    check_len(p.len(), q.len())?;
    let (pd, qd) = (model.density(p), model.density(q));
    Ok(pd
        .iter()
        .zip(&qd)
        .zip(model.mu.masses())
        .map(|((&a, &b), m)| model.gen.delta(a, b) * m)
        .sum())
}
