//! Discrepancy, divergence and relative loss.
//!
//! `D(P, zeta) = L(P, zeta) - H(P)` is the regret of `zeta` against `P`;
//! for scoring rules `d(P, Q) = D(P, zeta_Q)`. Taking losses relative to a
//! reference act `zeta_0` keeps the Bayes acts and turns the entropy into
//! `H_0(P) = -D(P, zeta_0)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::{weighted_sum, ExtReal};
use crate::losses::{BayesAct, BayesSet, LossModel, ModelFamily, Strictness};
use crate::prob::{check_len, expected_loss, mixture_of, Act, ActKind, Distribution, SampleSpace};

/// Tolerance for the Pythagorean and equalizer checks.
pub const PYTHAGOREAN_TOL: f64 = 1e-8;

/// `D(P, zeta) = L(P, zeta) - H(P)`.
pub fn discrepancy(p: &Distribution, act: &Act, model: &dyn LossModel) -> Result<ExtReal> {
    let l = expected_loss(p, act, model)?;
    let h = model.entropy(p)?;
    l.checked_sub(ExtReal::Finite(h))
}

/// `d(P, Q) = D(P, zeta_Q)` using the model's canonical Bayes act against `Q`.
pub fn div(p: &Distribution, q: &Distribution, model: &dyn LossModel) -> Result<ExtReal> {
    let zq = model.bayes_act(q)?.act;
    discrepancy(p, &zq, model)
}

/// Loss measured relative to a reference act: `L_0(x, a) = L(x, a) - L(x, zeta_0)`.
pub struct RelativeModel<'a> {
    base: &'a dyn LossModel,
    reference: Act,
    reference_losses: Vec<f64>,
    name: String,
}

pub fn relative_model<'a>(model: &'a dyn LossModel, zeta0: Act) -> Result<RelativeModel<'a>> {
    let losses = model.loss_vector(&zeta0)?;
    let reference_losses = losses
        .iter()
        .enumerate()
        .map(|(i, l)| l.finite().ok_or(Error::InfiniteReferenceLoss(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelativeModel {
        base: model,
        reference: zeta0,
        reference_losses,
        name: format!("{}_relative", model.name()),
    })
}

impl RelativeModel<'_> {
    pub fn base(&self) -> &dyn LossModel {
        self.base
    }

    pub fn reference(&self) -> &Act {
        &self.reference
    }

    pub fn reference_losses(&self) -> &[f64] {
        &self.reference_losses
    }

    fn reference_expectation(&self, p: &Distribution) -> f64 {
        p.as_slice()
            .iter()
            .zip(&self.reference_losses)
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl LossModel for RelativeModel<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn space(&self) -> &SampleSpace {
        self.base.space()
    }

    fn act_kind(&self) -> ActKind {
        self.base.act_kind()
    }

    fn strictness(&self) -> Strictness {
        self.base.strictness()
    }

    fn family(&self) -> ModelFamily {
        ModelFamily::Other
    }

    fn act_dim(&self) -> usize {
        self.base.act_dim()
    }

    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
        Ok(self
            .base
            .loss_vector(act)?
            .into_iter()
            .zip(&self.reference_losses)
            .map(|(l, r)| match l {
                ExtReal::Finite(v) => ExtReal::Finite(v - r),
                inf => inf,
            })
            .collect())
    }

    /// Same Bayes act as the base model; entropy `H(P) - L(P, zeta_0)`.
    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct> {
        let b = self.base.bayes_act(p)?;
        Ok(BayesAct {
            act: b.act,
            entropy: b.entropy - self.reference_expectation(p),
        })
    }

    fn bayes_set(&self, p: &Distribution) -> BayesSet {
        self.base.bayes_set(p)
    }

    fn quote(&self, q: &Distribution) -> Option<Act> {
        self.base.quote(q)
    }
}

/// An act whose loss does not depend on the outcome, when the model admits a
/// closed form for one.
pub fn find_neutral(model: &dyn LossModel) -> Option<Act> {
    let n = model.space().len();
    let candidate = match model.family() {
        ModelFamily::Brier | ModelFamily::ZeroOne => Act::distribution(&Distribution::uniform(n)),
        ModelFamily::Log(mu) => Act::density(vec![1.0 / mu.total(); n]),
        ModelFamily::Bregman => {
            // a constant density makes every separable Bregman score constant;
            // recover the total base mass from the Bayes act against uniform
            let q = model.bayes_act(&Distribution::uniform(n)).ok()?.act;
            let total: f64 = q.payload.iter().map(|d| (1.0 / n as f64) / d).sum();
            Act::density(vec![1.0 / total; n])
        }
        ModelFamily::Quadratic => {
            let p = Distribution::point_mass(n, 0);
            model.bayes_act(&p).ok()?.act
        }
        ModelFamily::Other => return None,
    };
    let losses = model.loss_vector(&candidate).ok()?;
    let vals: Vec<f64> = losses.iter().map(|l| l.finite()).collect::<Option<_>>()?;
    let spread = spread(&vals);
    (spread <= 1e-9).then_some(candidate)
}

/// Residuals of the two mixture identities
/// `H(Pbar) = sum w_i H(P_i) + sum w_i d(P_i, Pbar)` and
/// `d(Pbar, Q) = sum w_i d(P_i, Q) - sum w_i d(P_i, Pbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureResiduals {
    pub entropy_identity: f64,
    pub divergence_identity: f64,
}

pub fn mixture_identities(
    model: &dyn LossModel,
    components: &[Distribution],
    weights: &[f64],
    q: &Distribution,
) -> Result<MixtureResiduals> {
    check_len(components.len(), weights.len())?;
    Distribution::new(weights.to_vec())?;
    let pbar = mixture_of(components, weights)?;
    let h_bar = model.entropy(&pbar)?;
    let mut sum_h = 0.0;
    let mut to_bar = Vec::with_capacity(components.len());
    let mut to_q = Vec::with_capacity(components.len());
    for (c, w) in components.iter().zip(weights) {
        sum_h += w * model.entropy(c)?;
        to_bar.push(div(c, &pbar, model)?);
        to_q.push(div(c, q, model)?);
    }
    let avg_bar = weighted_sum(weights, &to_bar)?;
    let avg_q = weighted_sum(weights, &to_q)?;
    let lhs2 = div(&pbar, q, model)?;

    let entropy_identity = match avg_bar {
        ExtReal::Finite(d) => (h_bar - sum_h - d).abs(),
        _ => f64::INFINITY,
    };
    let divergence_identity = match (lhs2, avg_q, avg_bar) {
        (ExtReal::Finite(a), ExtReal::Finite(b), ExtReal::Finite(c)) => (a - (b - c)).abs(),
        // both sides infinite together
        (ExtReal::PosInf, ExtReal::PosInf, ExtReal::Finite(_)) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(MixtureResiduals {
        entropy_identity,
        divergence_identity,
    })
}

/// Slack of `D(P, zeta*) + D(P*, zeta_0) <= D(P, zeta_0)` over test points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PythagoreanReport {
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    pub max_slack: f64,
    /// Every slack within `1e-8` of zero.
    pub equality: bool,
}

impl PythagoreanReport {
    /// No slack below `-1e-8`.
    pub fn holds(&self) -> bool {
        self.min_slack >= -PYTHAGOREAN_TOL
    }
}

pub fn pythagorean_check(
    model: &dyn LossModel,
    test_points: &[Distribution],
    p_star: &Distribution,
    zeta_star: &Act,
    zeta0: &Act,
) -> Result<PythagoreanReport> {
    if test_points.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if let Some(i) = model.loss_vector(zeta0)?.iter().position(|l| !l.is_finite()) {
        return Err(Error::InfiniteReferenceLoss(i));
    }
    let d_star_ref = discrepancy(p_star, zeta0, model)?;
    let mut slacks = Vec::with_capacity(test_points.len());
    for p in test_points {
        let d_ref = discrepancy(p, zeta0, model)?;
        let d_star = discrepancy(p, zeta_star, model)?;
        let slack = d_ref.checked_sub(d_star)?.checked_sub(d_star_ref)?;
        slacks.push(match slack {
            ExtReal::Finite(v) => v,
            other => other.to_f64(),
        });
    }
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let max_slack = slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PythagoreanReport {
        equality: min_slack >= -PYTHAGOREAN_TOL && max_slack <= PYTHAGOREAN_TOL,
        slacks,
        min_slack,
        max_slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualizerReport {
    pub is_equalizer: bool,
    /// `max - min` of `L(P, zeta)` over the test points.
    pub spread: f64,
    pub losses: Vec<f64>,
}

/// Whether `L(., zeta)` is constant over the test points. Since `L(P, zeta)`
/// is linear in `P`, testing the vertices of a polytope suffices.
pub fn equalizer_check(model: &dyn LossModel, test_points: &[Distribution], zeta: &Act) -> Result<EqualizerReport> {
    let losses: Vec<f64> = test_points
        .iter()
        .map(|p| expected_loss(p, zeta, model).map(ExtReal::to_f64))
        .collect::<Result<_>>()?;
    let spread = if losses.iter().all(|l| l.is_finite()) {
        spread(&losses)
    } else {
        f64::INFINITY
    };
    Ok(EqualizerReport {
        is_equalizer: spread <= PYTHAGOREAN_TOL,
        spread,
        losses,
    })
}

pub(crate) fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    if v.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{brier_model, log_model, quadratic_model, zero_one_model};
    use crate::prob::BaseMeasure;

    fn s3() -> SampleSpace {
        SampleSpace::new(["-1", "0", "1"]).unwrap()
    }

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn discrepancy_examples() {
        let b = brier_model(s3());
        let u = Distribution::uniform(3);
        assert!(discrepancy(&u, &Act::distribution(&u), &b).unwrap().to_f64().abs() < 1e-15);
        let q = Act::distribution(&Distribution::point_mass(3, 0));
        // ||p - q||^2 = (2/3)^2 + 2 (1/3)^2
        assert!((discrepancy(&u, &q, &b).unwrap().to_f64() - 2.0 / 3.0).abs() < 1e-15);

        let z = zero_one_model(s3());
        let p = d(&[1.0 / 6.0, 5.0 / 12.0, 5.0 / 12.0]);
        let zeta = Act::distribution(&d(&[0.0, 1.0 / 3.0, 2.0 / 3.0]));
        assert!(discrepancy(&p, &zeta, &z).unwrap().to_f64().abs() < 1e-15);
    }

    #[test]
    fn divergence_examples() {
        let l = log_model(s3(), BaseMeasure::counting(3)).unwrap();
        let p = d(&[0.9, 0.1, 0.0]);
        assert_eq!(div(&p, &p, &l).unwrap(), ExtReal::Finite(0.0));
        let q = d(&[0.5, 0.5, 0.0]);
        let kl = 0.9 * (0.9f64 / 0.5).ln() + 0.1 * (0.1f64 / 0.5).ln();
        let got = div(&p, &q, &l).unwrap().to_f64();
        assert!((got - kl).abs() < 1e-15);
        assert!((got - 0.368064).abs() < 1e-6);

        let b = brier_model(s3());
        let got = div(&Distribution::point_mass(3, 0), &Distribution::point_mass(3, 1), &b).unwrap();
        assert_eq!(got, ExtReal::Finite(2.0));
    }

    #[test]
    fn relative_entropy_examples() {
        let b = brier_model(s3());
        let u = Distribution::uniform(3);
        let rel = relative_model(&b, Act::distribution(&u)).unwrap();
        let p = d(&[0.2, 0.5, 0.3]);
        let sq: f64 = p.as_slice().iter().map(|v| (v - 1.0 / 3.0).powi(2)).sum();
        assert!((rel.entropy(&p).unwrap() + sq).abs() < 1e-15);

        let rel = relative_model(&b, b.bayes_act(&p).unwrap().act).unwrap();
        assert!(rel.entropy(&p).unwrap().abs() < 1e-15);

        let mu0 = BaseMeasure::new(vec![0.2, 0.3, 0.5]).unwrap();
        let l = log_model(s3(), mu0.clone()).unwrap();
        let rel = relative_model(&l, Act::density(vec![1.0; 3])).unwrap();
        let kl: f64 = p
            .as_slice()
            .iter()
            .zip(mu0.masses())
            .map(|(a, m)| a * (a / m).ln())
            .sum();
        assert!((rel.entropy(&p).unwrap() + kl).abs() < 1e-15);
    }

    #[test]
    fn infinite_reference_loss_is_rejected() {
        let l = log_model(s3(), BaseMeasure::counting(3)).unwrap();
        let r = relative_model(&l, Act::density(vec![1.0, 0.0, 0.0]));
        assert!(matches!(r, Err(Error::InfiniteReferenceLoss(1))));
    }

    #[test]
    fn neutral_acts() {
        let z = zero_one_model(s3());
        let a = find_neutral(&z).unwrap();
        let lv = z.loss_vector(&a).unwrap();
        assert!(lv.iter().all(|l| (l.to_f64() - 2.0 / 3.0).abs() < 1e-15));

        let l = log_model(s3(), BaseMeasure::new(vec![0.2, 0.3, 0.5]).unwrap()).unwrap();
        let a = find_neutral(&l).unwrap();
        assert!(a.payload.iter().all(|q| (q - 1.0).abs() < 1e-15));
        assert!(l.loss_vector(&a).unwrap().iter().all(|v| v.to_f64().abs() < 1e-15));

        let q = quadratic_model(s3(), vec![-1.0, 0.0, 1.0]).unwrap();
        assert!(find_neutral(&q).is_none());
    }

    #[test]
    fn mixture_identity_examples() {
        let b = brier_model(s3());
        let comps = [Distribution::point_mass(3, 0), Distribution::point_mass(3, 2)];
        let r = mixture_identities(&b, &comps, &[0.5, 0.5], &Distribution::uniform(3)).unwrap();
        assert!(r.entropy_identity < 1e-15 && r.divergence_identity < 1e-15);

        let one = [d(&[0.2, 0.3, 0.5])];
        let r = mixture_identities(&b, &one, &[1.0], &Distribution::uniform(3)).unwrap();
        assert!(r.entropy_identity < 1e-15 && r.divergence_identity < 1e-15);
    }

    #[test]
    fn equalizer_examples() {
        let z = zero_one_model(s3());
        let zeta = Act::distribution(&d(&[0.0, 1.0 / 3.0, 2.0 / 3.0]));
        // vertices of Gamma_{1/4}: (0, 3/4, 1/4) and (3/8, 0, 5/8)
        let verts = [d(&[0.0, 0.75, 0.25]), d(&[0.375, 0.0, 0.625])];
        let r = equalizer_check(&z, &verts, &zeta).unwrap();
        assert!(r.is_equalizer);
        assert!((r.losses[0] - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn pythagorean_at_the_saddle_point_itself() {
        let b = brier_model(s3());
        let p = d(&[1.0 / 12.0, 1.0 / 3.0, 7.0 / 12.0]);
        let u = Act::distribution(&Distribution::uniform(3));
        let r = pythagorean_check(&b, std::slice::from_ref(&p), &p, &Act::distribution(&p), &u).unwrap();
        assert!(r.slacks[0].abs() < 1e-15);
        assert!(r.equality);
    }
}
