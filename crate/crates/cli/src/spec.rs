//! The JSON problem description and its translation into core objects.

use std::path::Path;

use anyhow::{bail, Context};
use maxent_core::losses::{bregman_model, brier_model, log_model, quadratic_model, zero_one_model, ConvexGenerator};
use maxent_core::{Act, BaseMeasure, Distribution, LossModel, SampleSpace, Statistic};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub outcomes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_measure: Option<Vec<f64>>,
    pub loss: LossSpec,
    /// `k` rows of `N` values.
    pub statistic: Vec<Vec<f64>>,
    pub constraint: ConstraintSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpec>,
    /// Member distributions of a statistical model, for derived games.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum LossSpec {
    Brier,
    Log,
    ZeroOne,
    Quadratic { values: Vec<f64> },
    Bregman { generator: GeneratorSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `s log s`
    Entropy,
    /// `s^2 - offset`
    Square {
        #[serde(default)]
        offset: f64,
    },
    /// `s^alpha`, `alpha > 1`
    Power { alpha: f64 },
}

/// A scalar or a vector; scalars are shorthand for `k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Coord {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Coord::Scalar(v) => vec![*v],
            Coord::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub from: Coord,
    pub to: Coord,
    /// Number of intervals; the grid has `steps + 1` points.
    pub steps: usize,
}

impl GridSpec {
    /// Evenly spaced points on the segment, endpoints included.
    pub fn points(&self) -> anyhow::Result<Vec<Vec<f64>>> {
        let (a, b) = (self.from.to_vec(), self.to.to_vec());
        if a.len() != b.len() {
            bail!("grid endpoints have lengths {} and {}", a.len(), b.len());
        }
        if self.steps == 0 {
            return Ok(vec![a]);
        }
        Ok((0..=self.steps)
            .map(|i| {
                let s = i as f64 / self.steps as f64;
                a.iter().zip(&b).map(|(x, y)| x + s * (y - x)).collect()
            })
            .collect())
    }

    /// Parses `from:to:steps` with comma-separated coordinates.
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid must look like FROM:TO:STEPS, got '{s}'");
        }
        Ok(Self {
            from: Coord::Vector(parse_vec(parts[0])?),
            to: Coord::Vector(parse_vec(parts[1])?),
            steps: parts[2]
                .trim()
                .parse()
                .with_context(|| format!("bad step count '{}'", parts[2]))?,
        })
    }
}

pub fn parse_vec(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number '{v}'")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintSpec {
    Tau(Coord),
    TauGrid(GridSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSpec {
    Act(Act),
    /// Reference act is the Bayes act against this distribution.
    Distribution(Vec<f64>),
}

impl ProblemSpec {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn space(&self) -> anyhow::Result<SampleSpace> {
        Ok(SampleSpace::new(self.outcomes.iter().cloned())?)
    }

    fn measure(&self) -> anyhow::Result<BaseMeasure> {
        Ok(match &self.base_measure {
            Some(m) => BaseMeasure::new(m.clone())?,
            None => BaseMeasure::counting(self.outcomes.len()),
        })
    }

    pub fn is_log(&self) -> bool {
        matches!(self.loss, LossSpec::Log)
    }

    pub fn build_model(&self) -> anyhow::Result<Box<dyn LossModel>> {
        let space = self.space()?;
        Ok(match &self.loss {
            LossSpec::Brier => Box::new(brier_model(space)),
            LossSpec::Log => Box::new(log_model(space, self.measure()?)?),
            LossSpec::ZeroOne => Box::new(zero_one_model(space)),
            LossSpec::Quadratic { values } => Box::new(quadratic_model(space, values.clone())?),
            LossSpec::Bregman { generator } => {
                let gen = match generator {
                    GeneratorSpec::Entropy => ConvexGenerator::entropy(),
                    GeneratorSpec::Square { offset } => ConvexGenerator::square(*offset),
                    GeneratorSpec::Power { alpha } => ConvexGenerator::power(*alpha)?,
                };
                Box::new(bregman_model(space, self.measure()?, gen)?)
            }
        })
    }

    pub fn statistic(&self) -> anyhow::Result<Statistic> {
        let t = Statistic::new(self.statistic.clone())?;
        if t.n() != self.outcomes.len() {
            bail!("statistic has {} columns for {} outcomes", t.n(), self.outcomes.len());
        }
        Ok(t)
    }

    /// The spec's grid, or `override_grid` when given.
    pub fn tau_grid(&self, override_grid: Option<&GridSpec>) -> anyhow::Result<Vec<Vec<f64>>> {
        match (override_grid, &self.constraint) {
            (Some(g), _) | (None, ConstraintSpec::TauGrid(g)) => g.points(),
            (None, ConstraintSpec::Tau(t)) => Ok(vec![t.to_vec()]),
        }
    }

    /// The single tau of a `solve` run.
    pub fn single_tau(&self, override_tau: Option<&[f64]>) -> anyhow::Result<Vec<f64>> {
        match (override_tau, &self.constraint) {
            (Some(t), _) => Ok(t.to_vec()),
            (None, ConstraintSpec::Tau(t)) => Ok(t.to_vec()),
            (None, ConstraintSpec::TauGrid(_)) => bail!("spec holds a tau grid; pass --tau"),
        }
    }

    pub fn reference_act(&self, model: &dyn LossModel) -> anyhow::Result<Option<Act>> {
        Ok(match &self.reference {
            None => None,
            Some(ReferenceSpec::Act(a)) => Some(a.clone()),
            Some(ReferenceSpec::Distribution(p)) => Some(model.bayes_act(&Distribution::new(p.clone())?)?.act),
        })
    }

    pub fn members(&self) -> anyhow::Result<Vec<Distribution>> {
        self.model
            .iter()
            .flatten()
            .map(|p| Ok(Distribution::new(p.clone())?))
            .collect()
    }
}
