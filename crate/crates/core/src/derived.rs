//! Derived games over a finite statistical model.
//!
//! Nature picks a member `P_w` of a model `{P_w}`, the decision maker picks
//! an act `a` and pays the discrepancy `D(P_w, a)`. Against a prior `Pi` the
//! Bayes act is the Bayes act against the mixture `P_Pi`, and the Bayes loss
//! is the expected value of information
//! `H(P_Pi) - sum_w Pi(w) H(P_w)`, which for the log score is the mutual
//! information between the member and the observation. Its maximum over
//! priors is the capacity, equal to the minimax regret.

use serde::Serialize;

use crate::divergence::{discrepancy, spread};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::losses::{LossModel, ModelFamily};
use crate::maxent::fw::FwProblem;
use crate::prob::{check_len, mixture_of, Act, Distribution};

/// A prior over the members of a [`StatModel`].
pub type Prior = Distribution;

/// Relative tolerance for membership in the set of members attaining the
/// capacity.
pub const UPSILON_TOL: f64 = 1e-6;
/// Spread allowed when checking that derived losses are constant.
pub const EQUALIZER_TOL: f64 = 1e-5;

pub struct StatModel<'a> {
    pub labels: Vec<String>,
    pub omegas: Vec<Distribution>,
    pub model: &'a dyn LossModel,
}

impl<'a> StatModel<'a> {
    pub fn new(model: &'a dyn LossModel, omegas: Vec<Distribution>) -> Result<Self> {
        let labels = (0..omegas.len()).map(|i| format!("w{i}")).collect();
        Self::with_labels(model, labels, omegas)
    }

    pub fn with_labels(model: &'a dyn LossModel, labels: Vec<String>, omegas: Vec<Distribution>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::Infeasible);
        }
        check_len(omegas.len(), labels.len())?;
        for p in &omegas {
            check_len(model.space().len(), p.len())?;
        }
        Ok(Self { labels, omegas, model })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// `P_Pi = sum_w Pi(w) P_w`.
    pub fn mixture(&self, prior: &Prior) -> Result<Distribution> {
        check_len(self.len(), prior.len())?;
        mixture_of(&self.omegas, prior.as_slice())
    }

    fn entropies(&self) -> Result<Vec<f64>> {
        self.omegas.iter().map(|p| self.model.entropy(p)).collect()
    }
}

/// `D(P_w, act)`.
pub fn derived_loss(sm: &StatModel, omega: usize, act: &Act) -> Result<ExtReal> {
    let p = sm.omegas.get(omega).ok_or(Error::DimensionMismatch {
        expected: sm.len(),
        got: omega + 1,
    })?;
    discrepancy(p, act, sm.model)
}

/// `H(P_Pi) - sum_w Pi(w) H(P_w)`.
pub fn value_of_information(sm: &StatModel, prior: &Prior) -> Result<f64> {
    let h_mix = sm.model.entropy(&sm.mixture(prior)?)?;
    let avg: f64 = prior.as_slice().iter().zip(sm.entropies()?).map(|(w, h)| w * h).sum();
    Ok(h_mix - avg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    pub pi_star: Prior,
    /// Bayes act against the mixture under `pi_star`; minimax for the
    /// derived game.
    pub act_star: Act,
    pub i_star: f64,
    /// Members whose derived loss against `act_star` attains `i_star`.
    pub upsilon: Vec<usize>,
    /// `D(P_w, act_star)` per member.
    pub derived_losses: Vec<f64>,
    pub iterations: usize,
    /// Frank-Wolfe gap, or the upper/lower bound gap of Blahut-Arimoto.
    pub gap: f64,
}

impl CapacityResult {
    /// Prior mass on `upsilon`.
    pub fn upsilon_mass(&self) -> f64 {
        self.upsilon.iter().map(|&w| self.pi_star.get(w)).sum()
    }
}

fn finish(sm: &StatModel, pi: Prior, iterations: usize, gap: f64) -> Result<CapacityResult> {
    let act_star = sm.model.bayes_act(&sm.mixture(&pi)?)?.act;
    let i_star = value_of_information(sm, &pi)?;
    let derived_losses = (0..sm.len())
        .map(|w| derived_loss(sm, w, &act_star).map(ExtReal::to_f64))
        .collect::<Result<Vec<f64>>>()?;
    let tol = UPSILON_TOL * i_star.abs().max(1.0);
    let upsilon = (0..sm.len()).filter(|&w| derived_losses[w] >= i_star - tol).collect();
    Ok(CapacityResult {
        pi_star: pi,
        act_star,
        i_star,
        upsilon,
        derived_losses,
        iterations,
        gap,
    })
}

/// Maximizes the value of information over priors by away-step Frank-Wolfe;
/// the supergradient coordinate of member `w` is `D(P_w, zeta_{P_Pi})`.
pub fn capacity_solve(sm: &StatModel, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    let offsets = sm.entropies()?.into_iter().map(|h| -h).collect();
    let pb = FwProblem {
        model: sm.model,
        atoms: &sm.omegas,
        offsets,
    };
    let r = pb.solve(tol, max_iter)?;
    if !r.converged {
        return Err(Error::MaxIterExceeded {
            iterations: r.iterations,
            gap: r.gap,
        });
    }
    finish(sm, Distribution::normalized(r.weights)?, r.iterations, r.gap)
}

/// The classical alternating algorithm for the log score; stops when the
/// capacity bounds `log sum Pi c` and `log max c` are within `tol`.
pub fn blahut_arimoto(sm: &StatModel, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    if !matches!(sm.model.family(), ModelFamily::Log(_)) {
        return Err(Error::Unsupported {
            model: sm.model.name().to_string(),
            what: "the alternating capacity algorithm needs the log score".into(),
        });
    }
    let m = sm.len();
    let mut pi = vec![1.0 / m as f64; m];
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let q = mixture_of(&sm.omegas, &pi)?;
        let d: Vec<f64> = sm.omegas.iter().map(|p| kl(p, &q)).collect();
        let c: Vec<f64> = d.iter().map(|v| v.exp()).collect();
        let z: f64 = pi.iter().zip(&c).map(|(a, b)| a * b).sum();
        let lower = z.ln();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap <= tol {
            break;
        }
        iterations += 1;
        pi = pi.iter().zip(&c).map(|(a, b)| a * b / z).collect();
    }
    if gap > tol {
        return Err(Error::MaxIterExceeded { iterations, gap });
    }
    finish(sm, Distribution::normalized(pi)?, iterations, gap)
}

fn kl(p: &Distribution, q: &Distribution) -> f64 {
    p.as_slice()
        .iter()
        .zip(q.as_slice())
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualizationReport {
    pub derived_losses: Vec<f64>,
    /// Spread of the derived losses over `upsilon`.
    pub spread_on_upsilon: f64,
    pub constant_on_upsilon: bool,
    /// Constant over every member, not just `upsilon`.
    pub is_equalizer: bool,
}

pub fn equalization_report(result: &CapacityResult, sm: &StatModel) -> Result<EqualizationReport> {
    let losses = (0..sm.len())
        .map(|w| derived_loss(sm, w, &result.act_star).map(ExtReal::to_f64))
        .collect::<Result<Vec<f64>>>()?;
    let on_u: Vec<f64> = result.upsilon.iter().map(|&w| losses[w]).collect();
    let spread_on_upsilon = spread(&on_u);
    Ok(EqualizationReport {
        constant_on_upsilon: spread_on_upsilon <= EQUALIZER_TOL,
        is_equalizer: spread(&losses) <= EQUALIZER_TOL,
        spread_on_upsilon,
        derived_losses: losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{brier_model, log_model};
    use crate::prob::{BaseMeasure, SampleSpace};

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    fn bsc_capacity() -> f64 {
        2f64.ln() - (0.1 * 10f64.ln() + 0.9 * (10.0f64 / 9.0).ln())
    }

    #[test]
    fn derived_loss_examples() {
        let l = log_model(SampleSpace::indexed(2).unwrap(), BaseMeasure::counting(2)).unwrap();
        let sm = StatModel::new(&l, vec![d(&[0.9, 0.1])]).unwrap();
        let v = derived_loss(&sm, 0, &Act::density(vec![0.5, 0.5])).unwrap().to_f64();
        assert!((v - 0.368064).abs() < 1e-6);
        let bayes = l.bayes_act(&sm.omegas[0]).unwrap().act;
        assert!(derived_loss(&sm, 0, &bayes).unwrap().to_f64().abs() < 1e-15);

        let b = brier_model(SampleSpace::indexed(3).unwrap());
        let sm = StatModel::new(&b, vec![d(&[1.0, 0.0, 0.0])]).unwrap();
        let v = derived_loss(&sm, 0, &Act::distribution(&d(&[0.0, 1.0, 0.0]))).unwrap();
        assert_eq!(v, ExtReal::Finite(2.0));
    }

    #[test]
    fn value_of_information_examples() {
        let l = log_model(SampleSpace::indexed(2).unwrap(), BaseMeasure::counting(2)).unwrap();
        let sm = StatModel::new(&l, vec![d(&[1.0, 0.0]), d(&[0.0, 1.0])]).unwrap();
        let half = d(&[0.5, 0.5]);
        assert!((value_of_information(&sm, &half).unwrap() - 2f64.ln()).abs() < 1e-15);
        let b = brier_model(SampleSpace::indexed(2).unwrap());
        let sm = StatModel::new(&b, vec![d(&[1.0, 0.0]), d(&[0.0, 1.0])]).unwrap();
        assert!((value_of_information(&sm, &half).unwrap() - 0.5).abs() < 1e-15);
        let sm = StatModel::new(&b, vec![d(&[0.3, 0.7])]).unwrap();
        assert_eq!(value_of_information(&sm, &d(&[1.0])).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_channel() {
        let l = log_model(SampleSpace::indexed(2).unwrap(), BaseMeasure::counting(2)).unwrap();
        let sm = StatModel::new(&l, vec![d(&[0.9, 0.1]), d(&[0.1, 0.9])]).unwrap();
        let r = capacity_solve(&sm, 1e-12, 10_000).unwrap();
        assert!((r.i_star - bsc_capacity()).abs() < 1e-9);
        assert!((r.pi_star.get(0) - 0.5).abs() < 1e-6);
        assert_eq!(r.upsilon, vec![0, 1]);
        let ba = blahut_arimoto(&sm, 1e-12, 100_000).unwrap();
        assert!((ba.i_star - bsc_capacity()).abs() < 1e-9);
        assert!(equalization_report(&r, &sm).unwrap().is_equalizer);
    }

    #[test]
    fn dominated_member_gets_no_mass() {
        let l = log_model(SampleSpace::indexed(2).unwrap(), BaseMeasure::counting(2)).unwrap();
        let sm = StatModel::new(&l, vec![d(&[0.9, 0.1]), d(&[0.1, 0.9]), d(&[0.5, 0.5])]).unwrap();
        let r = capacity_solve(&sm, 1e-12, 10_000).unwrap();
        let ba = blahut_arimoto(&sm, 1e-12, 1_000_000).unwrap();
        assert!((r.i_star - ba.i_star).abs() < 1e-9);
        assert!(r.pi_star.get(2) < 1e-9);
        assert_eq!(r.upsilon, vec![0, 1]);
        let rep = equalization_report(&r, &sm).unwrap();
        assert!(rep.constant_on_upsilon && !rep.is_equalizer);
    }
}
