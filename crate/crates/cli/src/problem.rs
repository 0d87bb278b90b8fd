//! A parsed spec bound to its loss model, and the failure type that carries
//! an exit code.

use std::fmt;

use maxent_core::constraints::GammaTau;
use maxent_core::divergence::relative_model;
use maxent_core::losses::ModelFamily;
use maxent_core::maxent::{solve, solve_generic, SaddlePoint, DEFAULT_MAX_ITER};
use maxent_core::{Act, Error, LossModel, Statistic};

use crate::record::error_code;
use crate::spec::ProblemSpec;

pub const EXIT_PARSE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_SADDLE: u8 = 3;
pub const EXIT_SUITE: u8 = 4;

/// An error paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    /// Infeasible or empty problems exit 2, malformed input 1, and numerical
    /// failures to produce a saddle point 3.
    pub fn classify(error: anyhow::Error) -> Self {
        let code = match error.chain().find_map(|e| e.downcast_ref::<Error>()) {
            Some(Error::Infeasible) => EXIT_INFEASIBLE,
            Some(e) if error_code(e) == "invalid_input" => EXIT_PARSE,
            Some(_) => EXIT_SADDLE,
            None => EXIT_PARSE,
        };
        Self { code, error }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub trait OrExit<T> {
    fn or_exit(self, code: u8) -> CmdResult<T>;
    fn classified(self) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, code: u8) -> CmdResult<T> {
        self.map_err(|e| Failure::new(code, e))
    }

    fn classified(self) -> CmdResult<T> {
        self.map_err(|e| Failure::classify(e.into()))
    }
}

pub struct Problem {
    pub spec: ProblemSpec,
    pub model: Box<dyn LossModel>,
    pub statistic: Statistic,
    /// Reference act of a relative game.
    pub reference: Option<Act>,
    /// Tolerance for the iterative solver; `None` keeps the default.
    pub tol: Option<f64>,
}

impl Problem {
    pub fn new(spec: ProblemSpec, tol: Option<f64>) -> anyhow::Result<Self> {
        let model = spec.build_model()?;
        let statistic = spec.statistic()?;
        let reference = spec.reference_act(model.as_ref())?;
        Ok(Self {
            spec,
            model,
            statistic,
            reference,
            tol,
        })
    }

    pub fn gamma(&self, tau: &[f64]) -> Result<GammaTau, Error> {
        GammaTau::new(self.statistic.clone(), tau.to_vec())
    }

    /// Runs `f` on the game being played: the relative game when a
    /// reference is set, the base game otherwise.
    pub fn with_game<R>(&self, f: impl FnOnce(&dyn LossModel) -> Result<R, Error>) -> Result<R, Error> {
        match &self.reference {
            Some(z0) => f(&relative_model(self.model.as_ref(), z0.clone())?),
            None => f(self.model.as_ref()),
        }
    }

    /// Saddle point of the game at `tau`.
    pub fn solve(&self, tau: &[f64]) -> Result<SaddlePoint, Error> {
        let g = self.gamma(tau)?;
        self.with_game(|m| self.dispatch(m, &g))
    }

    fn dispatch(&self, model: &dyn LossModel, g: &GammaTau) -> Result<SaddlePoint, Error> {
        let specialized = matches!(
            model.family(),
            ModelFamily::Brier | ModelFamily::Log(_) | ModelFamily::ZeroOne
        );
        match self.tol {
            Some(tol) if !specialized => solve_generic(model, g, tol, DEFAULT_MAX_ITER),
            _ => solve(model, g),
        }
    }

    /// Multiplier applied to printed loss values: `1 / ln 2` with `--bits`.
    pub fn scale(bits: bool) -> f64 {
        if bits {
            std::f64::consts::LOG2_E
        } else {
            1.0
        }
    }
}
