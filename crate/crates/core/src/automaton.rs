//! The three phases of a perception automaton.
//!
//! *Decomposition* turns an input into the basis activations it excites,
//! *learning* sets the weights from samples, and *realization* replays the
//! stored weights to produce one estimate per level. Realization never
//! touches the weights.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::basis::{active_bases, BasisId, Perceptlet};
use crate::error::{domain, Error, Result};
use crate::learner::{fit_boundary, fit_neighborhood, FitMode, FitReport, OnlineTrainer};
use crate::model::{to_perception_space, PerceptionModel, Sample};

/// One excited basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activation {
    pub basis: BasisId,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Boundary,
    Neighborhood,
    Online,
}

/// Optional mapping applied to raw inputs before they enter perception space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputMapping {
    #[default]
    None,
    Tanh,
}

impl InputMapping {
    pub fn apply(&self, x: f64) -> Result<f64> {
        match self {
            InputMapping::None => Ok(x),
            InputMapping::Tanh => to_perception_space(x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AutomatonConfig {
    pub perceptlet: Perceptlet,
    pub pr: u32,
    pub mode: Mode,
    pub input_mapping: InputMapping,
    pub truncation: Option<f64>,
}

impl AutomatonConfig {
    pub fn new(perceptlet: Perceptlet, pr: u32, mode: Mode) -> Self {
        AutomatonConfig {
            perceptlet,
            pr,
            mode,
            input_mapping: InputMapping::None,
            truncation: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pr == 0 {
            return domain("perception resolution must be at least 1");
        }
        if let Some(eps) = self.truncation {
            if eps.is_nan() || eps < 0.0 {
                return domain(format!("truncation threshold {eps} must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// Per-level outputs of a realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// The input after mapping into perception space.
    pub x: f64,
    /// `f^(1)(x), ..., f^(pr)(x)`.
    pub levels: Vec<f64>,
}

impl Realization {
    /// Estimate at the deepest level.
    pub fn estimate(&self) -> f64 {
        *self.levels.last().expect("pr >= 1")
    }
}

/// Entry points for the automaton phases.
pub struct Automaton;

impl Automaton {
    /// Bases excited by `x`, omitting zero activations.
    pub fn decompose(config: &AutomatonConfig, x: f64) -> Result<Vec<Activation>> {
        config.validate()?;
        let x = config.input_mapping.apply(x)?;
        Ok(active_bases(&config.perceptlet, x, config.pr)?
            .into_iter()
            .map(|(basis, value)| Activation { basis, value })
            .collect())
    }

    /// Learns a model from raw `(x, y)` pairs according to `config.mode`,
    /// then applies the configured truncation.
    pub fn learn(config: &AutomatonConfig, pairs: &[(f64, f64)]) -> Result<(PerceptionModel, FitReport)> {
        config.validate()?;
        let samples = pairs
            .iter()
            .map(|&(x, y)| Sample::new(config.input_mapping.apply(x)?, y))
            .collect::<Result<Vec<_>>>()?;
        let (model, mut report) = match config.mode {
            Mode::Boundary => fit_boundary(&config.perceptlet, &samples, config.pr)?,
            Mode::Neighborhood => fit_neighborhood(&config.perceptlet, &samples, config.pr)?,
            Mode::Online => {
                let mut trainer = OnlineTrainer::new(config.perceptlet.clone(), config.pr)?;
                for s in &samples {
                    trainer.observe_sample(s)?;
                }
                let model = trainer.model();
                let report = FitReport::build(&model, &samples, FitMode::Online, 1, Vec::new());
                (model, report)
            }
        };
        match config.truncation {
            Some(eps) if eps > 0.0 => {
                let t = model.truncate(eps)?;
                let mut truncated = FitReport::build(&t.model, &samples, report.mode, report.epochs_used, Vec::new());
                report.warnings.push(format!(
                    "truncated {} weights below {eps}; evaluation error bound {}",
                    t.removed, t.error_bound
                ));
                truncated.warnings = report.warnings;
                Ok((t.model, truncated))
            }
            _ => Ok((model, report)),
        }
    }

    /// Replays the stored weights at `x`.
    pub fn realize(model: &PerceptionModel, x: f64, config: &AutomatonConfig) -> Result<Realization> {
        let x = config.input_mapping.apply(x)?;
        Ok(Realization {
            x,
            levels: model.realize_all_levels(x)?,
        })
    }

    /// Response time of a realization when each level costs `node_delay`.
    pub fn timing_estimate(config: &AutomatonConfig, node_delay: f64) -> Result<f64> {
        if !node_delay.is_finite() || node_delay <= 0.0 {
            return domain(format!("node delay {node_delay} must be positive"));
        }
        Ok(config.pr as f64 * node_delay)
    }
}

pub fn save_model<W: Write>(model: &PerceptionModel, mut out: W) -> Result<()> {
    out.write_all(model.to_json()?.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn load_model<R: Read>(mut input: R) -> Result<PerceptionModel> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    PerceptionModel::from_json(&text)
}

pub fn save_model_file(model: &PerceptionModel, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    save_model(model, &mut buf)?;
    fs::write(path, buf).map_err(Error::from)
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<PerceptionModel> {
    load_model(fs::File::open(path)?)
}
