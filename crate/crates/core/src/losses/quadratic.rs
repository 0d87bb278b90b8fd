use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::prob::{check_len, Act, ActKind, Distribution, SampleSpace};

use super::{check_act, BayesAct, LossModel, ModelFamily, Strictness};

/// Squared error `L(x, a) = (v(x) - a)^2` for a real-valued outcome.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    space: SampleSpace,
    values: Vec<f64>,
}

pub fn quadratic_model(space: SampleSpace, values: Vec<f64>) -> Result<QuadraticModel> {
    check_len(space.len(), values.len())?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidAct("quadratic loss needs finite outcome values".into()));
    }
    Ok(QuadraticModel { space, values })
}

impl QuadraticModel {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl LossModel for QuadraticModel {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn space(&self) -> &SampleSpace {
        &self.space
    }

    fn act_kind(&self) -> ActKind {
        ActKind::Scalar
    }

    fn strictness(&self) -> Strictness {
        Strictness::Semistrict
    }

    fn family(&self) -> ModelFamily {
        ModelFamily::Quadratic
    }

    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
        check_act(self, act)?;
        let a = act.payload[0];
        Ok(self.values.iter().map(|v| ExtReal::Finite((v - a).powi(2))).collect())
    }

    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct> {
        check_len(self.space.len(), p.len())?;
        let mean: f64 = p.as_slice().iter().zip(&self.values).map(|(a, b)| a * b).sum();
        let var: f64 = p
            .as_slice()
            .iter()
            .zip(&self.values)
            .map(|(a, b)| a * (b - mean).powi(2))
            .sum();
        Ok(BayesAct {
            act: Act::scalar(mean),
            entropy: var,
        })
    }
}
