use crate::error::{Error, Result};
use crate::prob::{expected_loss, Distribution};
use crate::sampling::{random_distribution, seeded};

use super::LossModel;

/// Outcome of a randomized propriety check.
#[derive(Debug, Clone, PartialEq)]
pub struct ProprietyReport {
    pub trials: usize,
    /// Smallest observed `S(P, Q) - S(P, P)`.
    pub min_margin: f64,
}

/// Samples `(P, Q)` pairs and checks `S(P, Q) >= S(P, P) - 1e-9`.
///
/// Every fourth trial uses `Q = P`, so the reported margin of a proper rule is
/// zero up to round-off.
pub fn check_proper(model: &dyn LossModel, trials: usize, seed: u64) -> Result<ProprietyReport> {
    let n = model.space().len();
    let unsupported = || Error::Unsupported {
        model: model.name().to_string(),
        what: "propriety needs distribution-valued quotes".into(),
    };
    let mut rng = seeded(seed);
    let mut min_margin = f64::INFINITY;
    for trial in 0..trials {
        let p = random_distribution(&mut rng, n);
        let q = if trial % 4 == 0 {
            p.clone()
        } else {
            random_distribution(&mut rng, n)
        };
        let margin = margin(model, &p, &q).ok_or_else(unsupported)??;
        if margin < -1e-9 {
            return Err(Error::ProprietyViolation {
                p: p.as_slice().to_vec(),
                q: q.as_slice().to_vec(),
                margin,
            });
        }
        min_margin = min_margin.min(margin);
    }
    Ok(ProprietyReport { trials, min_margin })
}

fn margin(model: &dyn LossModel, p: &Distribution, q: &Distribution) -> Option<Result<f64>> {
    let (aq, ap) = (model.quote(q)?, model.quote(p)?);
    Some((|| {
        let spq = expected_loss(p, &aq, model)?;
        let spp = expected_loss(p, &ap, model)?;
        Ok(spq.checked_sub(spp)?.to_f64())
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext_real::ExtReal;
    use crate::losses::{brier_model, log_model, quadratic_model, BrierModel, Strictness};
    use crate::prob::{Act, ActKind, BaseMeasure, SampleSpace};

    /// Brier with the sign flipped.
    struct Negated(BrierModel);

    impl LossModel for Negated {
        fn name(&self) -> &str {
            "negated_brier"
        }
        fn space(&self) -> &SampleSpace {
            self.0.space()
        }
        fn act_kind(&self) -> ActKind {
            ActKind::Distribution
        }
        fn strictness(&self) -> Strictness {
            Strictness::None
        }
        fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
            Ok(self.0.loss_vector(act)?.into_iter().map(|v| v.scale(-1.0)).collect())
        }
        fn bayes_act(&self, p: &Distribution) -> Result<crate::losses::BayesAct> {
            self.0.bayes_act(p)
        }
        fn quote(&self, q: &Distribution) -> Option<Act> {
            self.0.quote(q)
        }
    }

    #[test]
    fn bundled_scores_are_proper() {
        let s = SampleSpace::indexed(4).unwrap();
        let r = check_proper(&brier_model(s.clone()), 1000, 0).unwrap();
        assert_eq!(r.trials, 1000);
        assert!(r.min_margin.abs() < 1e-12);
        let r = check_proper(&log_model(s, BaseMeasure::counting(4)).unwrap(), 1000, 0).unwrap();
        assert!(r.min_margin >= -1e-12);
    }

    #[test]
    fn negated_score_fails_with_witness() {
        let m = Negated(brier_model(SampleSpace::indexed(3).unwrap()));
        match check_proper(&m, 1000, 1) {
            Err(Error::ProprietyViolation { p, q, margin }) => {
                assert!(margin < -1e-9);
                assert_eq!(p.len(), 3);
                assert_ne!(p, q);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn scalar_models_are_rejected() {
        let m = quadratic_model(SampleSpace::indexed(3).unwrap(), vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(check_proper(&m, 10, 0), Err(Error::Unsupported { .. })));
    }
}
