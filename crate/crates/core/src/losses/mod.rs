//! Loss models: pointwise loss, Bayes acts and generalized entropy.
//!
//! Every model implements [`LossModel`]. The bundled models are
//!
//! | constructor | act | entropy `H(P)` |
//! |---|---|---|
//! | [`brier_model`] | distribution `q` | `1 - sum p^2` |
//! | [`log_model`] | density `q` w.r.t. `mu` | `-sum P log(P/mu)` |
//! | [`zero_one_model`] | randomized guess `zeta` | `1 - max p` |
//! | [`quadratic_model`] | scalar `a` | `var_P(v(X))` |
//! | [`bregman_model`] | density `q` w.r.t. `mu` | `-sum psi(p) mu` |
//!
//! Only separable Bregman scores are provided. A score built from an
//! arbitrary concave entropy through supporting hyperplanes would need a
//! selection rule at non-differentiable points and is left out.

mod bregman;
mod brier;
mod log;
mod propriety;
mod quadratic;
mod zero_one;

pub use bregman::{bregman_divergence, bregman_model, BregmanModel, ConvexGenerator};
pub use brier::{brier_model, BrierModel};
pub use log::{log_model, LogModel};
pub use propriety::{check_proper, ProprietyReport};
pub use quadratic::{quadratic_model, QuadraticModel};
pub use zero_one::{zero_one_model, ZeroOneModel, MODE_TOL};

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::prob::{Act, ActKind, BaseMeasure, Distribution, SampleSpace};

/// How sharply a model's Bayes act pins down the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Bayes act unique and identifies `P`.
    Strict,
    /// Bayes act unique, possibly shared between distributions.
    Semistrict,
    /// Strict relative to a subclass of distributions.
    RelativelyStrict,
    /// Bayes acts may be non-unique.
    None,
}

/// Tag used by solvers to pick a specialized algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    Brier,
    Log(BaseMeasure),
    ZeroOne,
    Quadratic,
    Bregman,
    Other,
}

/// A Bayes act together with the entropy it attains.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesAct {
    pub act: Act,
    pub entropy: f64,
}

/// Shape of the set of Bayes acts against a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BayesSet {
    Unique,
    /// Every randomized act supported on these outcomes is Bayes.
    Modes(Vec<usize>),
}

/// A decision problem on a finite sample space.
pub trait LossModel: Send + Sync {
    fn name(&self) -> &str;

    fn space(&self) -> &SampleSpace;

    fn act_kind(&self) -> ActKind;

    fn strictness(&self) -> Strictness;

    fn family(&self) -> ModelFamily {
        ModelFamily::Other
    }

    /// Length of an act payload.
    fn act_dim(&self) -> usize {
        match self.act_kind() {
            ActKind::Scalar => 1,
            _ => self.space().len(),
        }
    }

    /// `x -> L(x, act)`.
    fn loss_vector(&self, act: &Act) -> Result<Vec<ExtReal>>;

    fn loss(&self, x: usize, act: &Act) -> Result<ExtReal> {
        let v = self.loss_vector(act)?;
        v.get(x).copied().ok_or(Error::DimensionMismatch {
            expected: v.len(),
            got: x + 1,
        })
    }

    fn bayes_act(&self, p: &Distribution) -> Result<BayesAct>;

    fn entropy(&self, p: &Distribution) -> Result<f64> {
        Ok(self.bayes_act(p)?.entropy)
    }

    fn bayes_set(&self, _p: &Distribution) -> BayesSet {
        BayesSet::Unique
    }

    /// The act a scoring rule takes when quoting `q`; `None` when acts are not
    /// distribution-like.
    fn quote(&self, _q: &Distribution) -> Option<Act> {
        None
    }
}

pub(crate) fn check_act(model: &dyn LossModel, act: &Act) -> Result<()> {
    if act.kind != model.act_kind() {
        return Err(Error::InvalidAct(format!(
            "{} expects a {:?} act, got {:?}",
            model.name(),
            model.act_kind(),
            act.kind
        )));
    }
    if act.payload.len() != model.act_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.act_dim(),
            got: act.payload.len(),
        });
    }
    if act.payload.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidAct("NaN in act".into()));
    }
    Ok(())
}

/// Checks that a payload lies on the simplex (with the usual tolerances).
pub(crate) fn check_simplex(payload: &[f64]) -> Result<()> {
    Distribution::new(payload.to_vec()).map(|_| ())
}

/// Checks that `q` is a density of a probability w.r.t. `mu`.
pub(crate) fn check_density(q: &[f64], mu: &BaseMeasure) -> Result<()> {
    if let Some((i, &v)) = q.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeWeight { index: i, value: v });
    }
    let mass: f64 = q.iter().zip(mu.masses()).map(|(a, b)| a * b).sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum: mass });
    }
    Ok(())
}
