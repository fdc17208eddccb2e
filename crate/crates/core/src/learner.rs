//! Learning the weights of a [`PerceptionModel`].
//!
//! Three strategies are provided:
//!
//! - [`fit_boundary`] for samples that sit exactly on the dyadic grid. Each
//!   weight is the residual at its own center after the coarser levels, so
//!   the fitted model passes through every sample.
//! - [`fit_neighborhood`] for samples anywhere in `[-1, +1]`. Levels are
//!   fitted in ascending order against the residual of the others, using
//!   recursive least squares per basis.
//! - [`OnlineTrainer`] for streams, pushing each sample once through the
//!   level cascade.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::{active_bases, bases_through, BasisId, Perceptlet};
use crate::dyadic::Dyadic;
use crate::error::{domain, Error, Result};
use crate::model::{zero_weights, PerceptionModel, Sample};

/// A sample matches a grid center when it is this close.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Recursive least squares estimate of a single basis weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlsEstimate {
    pub w_hat: f64,
    /// Learning indicator `1 / sum(b^2)`.
    pub indicator: f64,
    /// Samples absorbed with nonzero activation.
    pub count: usize,
}

/// Learning state of one basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RlsState {
    /// No sample with nonzero activation has arrived yet.
    #[default]
    Uninitialized,
    Active(RlsEstimate),
}

impl RlsState {
    /// State after the first sample. A zero activation carries no
    /// information and leaves the state uninitialized.
    pub fn init(activation: f64, y: f64) -> Self {
        if activation == 0.0 {
            return RlsState::Uninitialized;
        }
        RlsState::Active(RlsEstimate {
            w_hat: y / activation,
            indicator: 1.0 / (activation * activation),
            count: 1,
        })
    }

    /// Absorbs one more sample.
    pub fn update(self, activation: f64, y: f64) -> Self {
        match self {
            _ if activation == 0.0 => self,
            RlsState::Uninitialized => Self::init(activation, y),
            RlsState::Active(s) => {
                let indicator = s.indicator / (1.0 + activation * activation * s.indicator);
                let gain = activation * indicator;
                RlsState::Active(RlsEstimate {
                    w_hat: s.w_hat + gain * (y - activation * s.w_hat),
                    indicator,
                    count: s.count + 1,
                })
            }
        }
    }

    pub fn weight(&self) -> Option<f64> {
        match self {
            RlsState::Active(s) => Some(s.w_hat),
            RlsState::Uninitialized => None,
        }
    }
}

/// Closed-form least squares weight `sum(b y) / sum(b^2)`.
pub fn batch_weight(samples: &[(f64, f64)]) -> Result<f64> {
    let (num, den) = samples
        .iter()
        .fold((0.0, 0.0), |(n, d), &(b, y)| (n + b * y, d + b * b));
    if den == 0.0 {
        return Err(Error::UndefinedWeight);
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Boundary,
    Neighborhood,
    Online,
}

/// Summary of a fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub mode: FitMode,
    pub epochs_used: usize,
    /// `max |y - f^(pr)(x)|` over the training samples.
    pub max_residual: f64,
    /// `max |y - f^(k)(x)|` for `k = 1..=pr`.
    pub per_level_residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

impl FitReport {
    pub(crate) fn build(
        model: &PerceptionModel,
        samples: &[Sample],
        mode: FitMode,
        epochs_used: usize,
        mut warnings: Vec<String>,
    ) -> Self {
        let mut per_level = vec![0.0f64; model.pr() as usize];
        for s in samples {
            let mut f = 0.0;
            for (k, slot) in per_level.iter_mut().enumerate() {
                f += model.level_sum(s.x, k as u32 + 1);
                *slot = slot.max((s.y - f).abs());
            }
        }
        warnings.extend(model.range_warnings());
        FitReport {
            mode,
            epochs_used,
            max_residual: per_level.last().copied().unwrap_or(0.0),
            per_level_residuals: per_level,
            warnings,
        }
    }
}

fn grid_nodes(samples: &[Sample], pr: u32) -> Result<Vec<Dyadic>> {
    samples
        .iter()
        .enumerate()
        .map(|(index, s)| Dyadic::snap(s.x, pr, GRID_TOLERANCE).ok_or(Error::OffGrid { index, x: s.x, pr }))
        .collect()
}

/// True when the samples arrive grouped by ascending basis level.
pub fn is_hierarchical_order(samples: &[Sample], pr: u32) -> Result<bool> {
    let nodes = grid_nodes(samples, pr)?;
    Ok(nodes.windows(2).all(|w| w[0].level() <= w[1].level()))
}

// Passes over `nodes` needed when a node can only be learned once every
// node of the coarser levels has been.
fn count_epochs(nodes: &[Dyadic], pr: u32) -> usize {
    let mut remaining = vec![0usize; pr as usize + 2];
    let distinct: BTreeSet<Dyadic> = nodes.iter().copied().collect();
    for n in &distinct {
        remaining[n.level().expect("grid node") as usize] += 1;
    }
    let mut learned = BTreeSet::new();
    let mut ready = 1usize;
    let advance = |ready: &mut usize, remaining: &[usize]| {
        while *ready <= pr as usize && remaining[*ready] == 0 {
            *ready += 1;
        }
    };
    advance(&mut ready, &remaining);
    let mut epochs = 0;
    while learned.len() < distinct.len() {
        epochs += 1;
        for n in nodes {
            let level = n.level().expect("grid node") as usize;
            if level <= ready && learned.insert(*n) {
                remaining[level] -= 1;
                advance(&mut ready, &remaining);
            }
        }
    }
    epochs.max(1)
}

/// Fits a model to samples covering the full level-`pr` grid.
///
/// Every weight is the residual of its center's sample after the coarser
/// levels, so the model reproduces each sample. When a node appears more
/// than once the last sample wins.
pub fn fit_boundary(perceptlet: &Perceptlet, samples: &[Sample], pr: u32) -> Result<(PerceptionModel, FitReport)> {
    let mut model = PerceptionModel::new(perceptlet.clone(), pr)?;
    let nodes = grid_nodes(samples, pr)?;

    let mut values = BTreeMap::new();
    let mut warnings = Vec::new();
    for (node, s) in nodes.iter().zip(samples) {
        if values.insert(*node, s.y).is_some() {
            warnings.push(format!("duplicate sample at x = {node}; the last one is used"));
        }
    }
    let ids = bases_through(pr)?;
    let missing: Vec<String> = ids
        .iter()
        .filter(|id| !values.contains_key(&id.center()))
        .map(|id| id.center().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingNodes(missing));
    }

    for id in ids {
        let y = values[&id.center()];
        let w = match id.level() {
            1 => y,
            level => y - model.evaluate_unchecked(id.center().to_f64(), level - 1),
        };
        model.set_weight(id, w)?;
    }

    let epochs = count_epochs(&nodes, pr);
    let report = FitReport::build(&model, samples, FitMode::Boundary, epochs, warnings);
    Ok((model, report))
}

/// Controls [`fit_neighborhood_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodOptions {
    /// Upper bound on cascade sweeps. One sweep is the strict cascade where
    /// each level is frozen before the next is fitted.
    pub max_sweeps: usize,
    /// Stop once no weight moves by more than this in a sweep.
    pub tolerance: f64,
}

impl Default for NeighborhoodOptions {
    fn default() -> Self {
        NeighborhoodOptions {
            max_sweeps: 20_000,
            tolerance: 1e-14,
        }
    }
}

/// [`fit_neighborhood_with`] using default options.
pub fn fit_neighborhood(perceptlet: &Perceptlet, samples: &[Sample], pr: u32) -> Result<(PerceptionModel, FitReport)> {
    fit_neighborhood_with(perceptlet, samples, pr, NeighborhoodOptions::default())
}

/// Fits a model to samples at arbitrary positions.
///
/// Each sweep visits the levels in ascending order. Level `k` is fitted to
/// the residual `y - (sum of every other level)`: the two level-1 weights
/// jointly by minimum-norm least squares, and each deeper basis on its own
/// by recursive least squares (same-level supports do not overlap, so this
/// is the joint solution for the level). The first sweep is the plain
/// coarse-to-fine cascade; later sweeps refine it toward the joint least
/// squares fit of all levels and stop when the weights settle.
pub fn fit_neighborhood_with(
    perceptlet: &Perceptlet,
    samples: &[Sample],
    pr: u32,
    options: NeighborhoodOptions,
) -> Result<(PerceptionModel, FitReport)> {
    if samples.is_empty() {
        return domain("neighborhood fit needs at least one sample");
    }
    if options.max_sweeps == 0 {
        return domain("max_sweeps must be at least 1");
    }
    let mut model = PerceptionModel::from_parts(perceptlet.clone(), pr, zero_weights(pr)?);

    // Per level: basis -> [(sample index, activation)].
    let mut layout: Vec<BTreeMap<BasisId, Vec<(usize, f64)>>> = vec![BTreeMap::new(); pr as usize];
    for (i, s) in samples.iter().enumerate() {
        for (id, a) in active_bases(perceptlet, s.x, pr)? {
            layout[id.level() as usize - 1].entry(id).or_default().push((i, a));
        }
    }
    let level_one = level_one_design(perceptlet, samples);

    // contributions[k][i]: current output of level k+1 at sample i
    let mut contributions = vec![vec![0.0; samples.len()]; pr as usize];
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for k in 0..pr as usize {
            let targets: Vec<f64> = samples
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let others: f64 = contributions
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, c)| c[i])
                        .sum();
                    s.y - others
                })
                .collect();

            let new_weights: Vec<(BasisId, f64)> = if k == 0 {
                let (w_neg, w_pos) = solve_level_one(&level_one, &targets);
                vec![
                    (BasisId::at(Dyadic::MINUS_ONE)?, w_neg),
                    (BasisId::at(Dyadic::ONE)?, w_pos),
                ]
            } else {
                layout[k]
                    .iter()
                    .map(|(id, acts)| {
                        let state = acts
                            .iter()
                            .fold(RlsState::Uninitialized, |s, &(i, a)| s.update(a, targets[i]));
                        (*id, state.weight().unwrap_or(0.0))
                    })
                    .collect()
            };

            let weights = model.weights_mut();
            for (id, w) in new_weights {
                let old = weights.insert(id, w).unwrap_or(0.0);
                max_change = max_change.max((w - old).abs());
            }
            for (i, s) in samples.iter().enumerate() {
                contributions[k][i] = model.level_sum(s.x, k as u32 + 1);
            }
        }
        if max_change <= options.tolerance || sweeps >= options.max_sweeps {
            break;
        }
    }

    let mut warnings = Vec::new();
    if sweeps >= options.max_sweeps && options.max_sweeps > 1 {
        warnings.push(format!("weights still moving after {sweeps} sweeps"));
    }
    let report = FitReport::build(&model, samples, FitMode::Neighborhood, sweeps * pr as usize, warnings);
    Ok((model, report))
}

fn level_one_design(perceptlet: &Perceptlet, samples: &[Sample]) -> DMatrix<f64> {
    let neg = BasisId::at(Dyadic::MINUS_ONE).expect("level-1 center");
    let pos = BasisId::at(Dyadic::ONE).expect("level-1 center");
    DMatrix::from_fn(samples.len(), 2, |i, j| {
        let id = if j == 0 { &neg } else { &pos };
        perceptlet.eval_unchecked(id, samples[i].x)
    })
}

// Minimum-norm least squares for (w_-1, w_+1).
fn solve_level_one(design: &DMatrix<f64>, targets: &[f64]) -> (f64, f64) {
    let svd = design.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    let rhs = DVector::from_column_slice(targets);
    match svd.solve(&rhs, cutoff) {
        Ok(w) => (w[0], w[1]),
        Err(_) => (0.0, 0.0),
    }
}

/// Incremental trainer that absorbs one sample at a time.
///
/// Each sample is pushed through the levels in ascending order. Level `k`
/// sees the residual of the sample against the current weights of levels
/// below `k`, and every active level-`k` basis takes one recursive least
/// squares step toward it.
#[derive(Debug, Clone)]
pub struct OnlineTrainer {
    perceptlet: Perceptlet,
    pr: u32,
    states: BTreeMap<BasisId, RlsState>,
    samples_seen: usize,
}

impl OnlineTrainer {
    pub fn new(perceptlet: Perceptlet, pr: u32) -> Result<Self> {
        let states = bases_through(pr)?
            .into_iter()
            .map(|id| (id, RlsState::Uninitialized))
            .collect();
        Ok(OnlineTrainer {
            perceptlet,
            pr,
            states,
            samples_seen: 0,
        })
    }

    pub fn pr(&self) -> u32 {
        self.pr
    }

    pub fn samples_seen(&self) -> usize {
        self.samples_seen
    }

    pub fn state(&self, id: &BasisId) -> Option<&RlsState> {
        self.states.get(id)
    }

    /// Absorbs `(x, y)`; `x = None` is a Null perception and is rejected.
    /// On error the trainer is left untouched.
    pub fn observe(&mut self, x: Option<f64>, y: f64) -> Result<()> {
        let x = x.ok_or(Error::NullPerception)?;
        self.observe_sample(&Sample::new(x, y)?)
    }

    pub fn observe_sample(&mut self, sample: &Sample) -> Result<()> {
        let sample = Sample::new(sample.x, sample.y)?;
        let active = active_bases(&self.perceptlet, sample.x, self.pr)?;
        let mut lower = 0.0;
        for level in 1..=self.pr {
            let residual = sample.y - lower;
            let mut level_output = 0.0;
            for (id, a) in active.iter().filter(|(id, _)| id.level() == level) {
                let state = self.states.entry(*id).or_default();
                *state = state.update(*a, residual);
                level_output += a * state.weight().unwrap_or(0.0);
            }
            lower += level_output;
        }
        self.samples_seen += 1;
        Ok(())
    }

    /// Snapshot of the current weights.
    pub fn model(&self) -> PerceptionModel {
        let weights = self
            .states
            .iter()
            .map(|(id, s)| (*id, s.weight().unwrap_or(0.0)))
            .collect();
        PerceptionModel::from_parts(self.perceptlet.clone(), self.pr, weights)
    }
}
