use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::prob::{check_len, Act, ActKind, BaseMeasure, Distribution, SampleSpace};

use super::{check_act, check_density, BayesAct, LossModel, ModelFamily, Strictness};

/// Logarithmic score `S(x, q) = -log q(x)`, with `q` a density w.r.t. `mu`.
#[derive(Debug, Clone)]
pub struct LogModel {
    space: SampleSpace,
    mu: BaseMeasure,
}

pub fn log_model(space: SampleSpace, mu: BaseMeasure) -> Result<LogModel> {
    check_len(space.len(), mu.len())?;
    if let Some((index, &value)) = mu.masses().iter().enumerate().find(|(_, m)| m.is_nan() || **m <= 0.0) {
        return Err(Error::ZeroBaseMass { index, value });
    }
    Ok(LogModel { space, mu })
}

impl LogModel {
    pub fn base_measure(&self) -> &BaseMeasure {
        &self.mu
    }

    /// Density of `p` with respect to the base measure.
    pub fn density(&self, p: &Distribution) -> Vec<f64> {
        p.as_slice().iter().zip(self.mu.masses()).map(|(a, m)| a / m).collect()
    }
}

impl LossModel for LogModel {
    fn name(&self) -> &str {
        "log"
    }

    fn space(&self) -> &SampleSpace {
        &self.space
    }

    fn act_kind(&self) -> ActKind {
        ActKind::Density
    }

    fn strictness(&self) -> Strictness {
        Strictness::Strict
    }

    fn family(&self) -> ModelFamily {
        ModelFamily::Log(self.mu.clone())
    }

    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
        check_act(self, act)?;
        check_density(&act.payload, &self.mu)?;
        Ok(act
            .payload
            .iter()
            .map(|&q| {
                if q > 0.0 {
                    ExtReal::Finite(-q.ln())
                } else {
                    ExtReal::PosInf
                }
            })
            .collect())
    }

    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct> {
        check_len(self.space.len(), p.len())?;
        let q = self.density(p);
        let entropy = -p
            .as_slice()
            .iter()
            .zip(&q)
            .filter(|(pi, _)| **pi > 0.0)
            .map(|(pi, qi)| pi * qi.ln())
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::expected_loss;

    fn space() -> SampleSpace {
        SampleSpace::new(["-1", "0", "1"]).unwrap()
    }

    #[test]
    fn shannon_entropy_with_counting_measure() {
        let m = log_model(space(), BaseMeasure::counting(3)).unwrap();
        assert!((m.entropy(&Distribution::uniform(3)).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert_eq!(m.entropy(&Distribution::point_mass(3, 0)).unwrap(), 0.0);
    }

    #[test]
    fn probability_base_gives_negative_kl() {
        let m = log_model(space(), BaseMeasure::new(vec![1.0 / 3.0; 3]).unwrap()).unwrap();
        let p = Distribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        // direct KL(P, mu) summation
        let kl: f64 = [0.5f64, 0.5].iter().map(|pi| pi * (pi / (1.0 / 3.0)).ln()).sum();
        assert!((m.entropy(&p).unwrap() + kl).abs() < 1e-15);
        assert!((m.entropy(&p).unwrap() + 0.4054651081081644).abs() < 1e-12);
    }

    #[test]
    fn expected_log_loss() {
        let m = log_model(space(), BaseMeasure::counting(3)).unwrap();
        let delta = Distribution::point_mass(3, 0);
        let q = Act::density(vec![1.0, 0.0, 0.0]);
        assert_eq!(expected_loss(&delta, &q, &m).unwrap(), ExtReal::Finite(0.0));
        let half = Distribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(expected_loss(&half, &q, &m).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn rejects_zero_base_mass() {
        let mu = BaseMeasure::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(log_model(space(), mu).is_ok());
        assert!(BaseMeasure::new(vec![1.0, 0.0, 1.0]).is_err());
        assert!(log_model(SampleSpace::indexed(2).unwrap(), BaseMeasure::counting(3)).is_err());
    }
}
