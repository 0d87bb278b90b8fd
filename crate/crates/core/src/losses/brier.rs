use crate::error::Result;
use crate::ext_real::ExtReal;
use crate::prob::{Act, ActKind, Distribution, SampleSpace};

use super::{check_act, check_simplex, BayesAct, LossModel, ModelFamily, Strictness};

/// Brier score `S(x, q) = ||delta_x - q||^2`.
#[derive(Debug, Clone)]
pub struct BrierModel {
    space: SampleSpace,
}

pub fn brier_model(space: SampleSpace) -> BrierModel {
    BrierModel { space }
}

impl LossModel for BrierModel {
    fn name(&self) -> &str {
        "brier"
    }

    fn space(&self) -> &SampleSpace {
        &self.space
    }

    fn act_kind(&self) -> ActKind {
        ActKind::Distribution
    }

    fn strictness(&self) -> Strictness {
        Strictness::Strict
    }

    fn family(&self) -> ModelFamily {
        ModelFamily::Brier
    }

    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
        check_act(self, act)?;
        check_simplex(&act.payload)?;
        let q = &act.payload;
        let sq: f64 = q.iter().map(|v| v * v).sum();
        Ok(q.iter().map(|&qx| ExtReal::Finite(sq - 2.0 * qx + 1.0)).collect())
    }

    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct> {
        crate::prob::check_len(self.space.len(), p.len())?;
        let entropy = 1.0 - p.as_slice().iter().map(|v| v * v).sum::<f64>();
        Ok(BayesAct {
            act: Act::distribution(p),
            entropy,
        })
    }

    fn quote(&self, q: &Distribution) -> Option<Act> {
        Some(Act::distribution(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::expected_loss;

    fn model() -> BrierModel {
        brier_model(SampleSpace::new(["-1", "0", "1"]).unwrap())
    }

    #[test]
    fn entropy_examples() {
        let m = model();
        assert!((m.entropy(&Distribution::uniform(3)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.entropy(&Distribution::point_mass(3, 0)).unwrap(), 0.0);
    }

    #[test]
    fn pointwise_loss() {
        let m = model();
        let q = Act::distribution(&Distribution::point_mass(3, 0));
        assert_eq!(m.loss(0, &q).unwrap(), ExtReal::Finite(0.0));
        assert_eq!(m.loss(1, &q).unwrap(), ExtReal::Finite(2.0));
    }

    #[test]
    fn expected_loss_of_uniform_quote() {
        let m = model();
        let u = Distribution::uniform(3);
        let l = expected_loss(&u, &Act::distribution(&u), &m).unwrap();
        assert!((l.to_f64() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_simplex_act() {
        let m = model();
        let bad = Act {
            kind: ActKind::Distribution,
            payload: vec![0.5, 0.6, 0.1],
        };
        assert!(m.loss_vector(&bad).is_err());
        let wrong_kind = Act::density(vec![1.0 / 3.0; 3]);
        assert!(m.loss_vector(&wrong_kind).is_err());
    }
}
