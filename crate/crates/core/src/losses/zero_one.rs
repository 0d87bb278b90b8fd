use crate::error::Result;
use crate::ext_real::ExtReal;
use crate::prob::{check_len, Act, ActKind, Distribution, SampleSpace};

use super::{check_act, check_simplex, BayesAct, BayesSet, LossModel, ModelFamily, Strictness};

/// Probabilities within this distance of the maximum count as modes.
pub const MODE_TOL: f64 = 1e-9;

/// Zero-one loss on point guesses; acts are randomized guesses `zeta`, with
/// `L(x, zeta) = 1 - zeta(x)`.
#[derive(Debug, Clone)]
pub struct ZeroOneModel {
    space: SampleSpace,
}

pub fn zero_one_model(space: SampleSpace) -> ZeroOneModel {
    ZeroOneModel { space }
}

impl ZeroOneModel {
    pub fn modes(&self, p: &Distribution) -> Vec<usize> {
        let pmax = p.as_slice().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..p.len()).filter(|&i| p.get(i) >= pmax - MODE_TOL).collect()
    }
}

impl LossModel for ZeroOneModel {
    fn name(&self) -> &str {
        "zero_one"
    }

    fn space(&self) -> &SampleSpace {
        &self.space
    }

    fn act_kind(&self) -> ActKind {
        ActKind::Distribution
    }

    fn strictness(&self) -> Strictness {
        Strictness::None
    }

    fn family(&self) -> ModelFamily {
        ModelFamily::ZeroOne
    }

    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>> {
        check_act(self, act)?;
        check_simplex(&act.payload)?;
        Ok(act.payload.iter().map(|z| ExtReal::Finite(1.0 - z)).collect())
    }

    /// Uniform randomization over the modes of `p`.
    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct> {
        check_len(self.space.len(), p.len())?;
        let modes = self.modes(p);
        let mut zeta = vec![0.0; p.len()];
        for &m in &modes {
            zeta[m] = 1.0 / modes.len() as f64;
        }
        let pmax = p.as_slice().iter().copied().fold(0.0, f64::max);
        Ok(BayesAct {
            act: Act {
                kind: ActKind::Distribution,
                payload: zeta,
            },
            entropy: 1.0 - pmax,
        })
    }

    fn bayes_set(&self, p: &Distribution) -> BayesSet {
        BayesSet::Modes(self.modes(p))
    }

    fn quote(&self, q: &Distribution) -> Option<Act> {
        self.bayes_act(q).ok().map(|b| b.act)
    }
}
