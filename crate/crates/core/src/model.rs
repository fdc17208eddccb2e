//! Weighted basis hierarchy and its level-wise evaluation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::basis::{bases_through, BasisId, Perceptlet};
use crate::dyadic::{Dyadic, MAX_LEVEL};
use crate::error::{check_perception, domain, Error, Result};

/// Rounding allowance for [`PerceptionModel::range_warnings`].
const RANGE_SLACK: f64 = 1e-12;

/// Current model document version.
pub const FORMAT_VERSION: u32 = 1;

/// One observation: `x` in perception space, `y` the logical belonging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        check_perception(x)?;
        if !y.is_finite() || !(0.0..=1.0).contains(&y) {
            return domain(format!("logical value y = {y} is outside [0, 1]"));
        }
        Ok(Sample { x, y })
    }
}

/// Weights over the basis hierarchy of a single percept-let family.
///
/// Level-1 weights are the function values at the extremes; every weight of
/// level two and above is a correction on top of the coarser levels. Bases
/// without a stored weight contribute nothing.
#[derive(Debug, Clone)]
pub struct PerceptionModel {
    perceptlet: Perceptlet,
    pr: u32,
    weights: BTreeMap<BasisId, f64>,
}

impl PerceptionModel {
    /// An empty model of resolution `pr`.
    pub fn new(perceptlet: Perceptlet, pr: u32) -> Result<Self> {
        if pr == 0 || pr > MAX_LEVEL {
            return domain(format!("perception resolution {pr} is outside 1..={MAX_LEVEL}"));
        }
        Ok(PerceptionModel {
            perceptlet,
            pr,
            weights: BTreeMap::new(),
        })
    }

    pub fn with_weights(
        perceptlet: Perceptlet,
        pr: u32,
        weights: impl IntoIterator<Item = (BasisId, f64)>,
    ) -> Result<Self> {
        let mut model = Self::new(perceptlet, pr)?;
        for (id, w) in weights {
            model.set_weight(id, w)?;
        }
        Ok(model)
    }

    pub fn perceptlet(&self) -> &Perceptlet {
        &self.perceptlet
    }

    pub fn pr(&self) -> u32 {
        self.pr
    }

    pub fn weights(&self) -> &BTreeMap<BasisId, f64> {
        &self.weights
    }

    pub fn weight(&self, id: &BasisId) -> f64 {
        self.weights.get(id).copied().unwrap_or(0.0)
    }

    pub fn set_weight(&mut self, id: BasisId, w: f64) -> Result<()> {
        if id.level() > self.pr {
            return domain(format!("basis {id} is deeper than resolution {}", self.pr));
        }
        if !w.is_finite() {
            return domain(format!("weight of {id} is not finite"));
        }
        self.weights.insert(id, w);
        Ok(())
    }

    /// True when every basis of levels `1..=pr` carries a weight.
    pub fn is_fully_populated(&self) -> bool {
        self.weights.len() == basis_count(self.pr).unwrap_or(0)
    }

    fn check_level(&self, level: u32, min: u32) -> Result<()> {
        if level < min || level > self.pr {
            return domain(format!("level {level} is outside {min}..={}", self.pr));
        }
        Ok(())
    }

    /// Estimate `f^(k)(x)` using levels `1..=up_to_level`. Not clamped.
    pub fn evaluate(&self, x: f64, up_to_level: u32) -> Result<f64> {
        let x = check_perception(x)?;
        self.check_level(up_to_level, 1)?;
        Ok(self.evaluate_unchecked(x, up_to_level))
    }

    pub(crate) fn evaluate_unchecked(&self, x: f64, up_to_level: u32) -> f64 {
        (1..=up_to_level).map(|k| self.level_sum(x, k)).sum()
    }

    // Levels are summed one at a time so that consecutive estimates differ
    // by exactly one level's contribution.
    pub(crate) fn level_sum(&self, x: f64, level: u32) -> f64 {
        self.level_weights(level)
            .map(|(id, w)| w * self.perceptlet.eval_unchecked(id, x))
            .sum()
    }

    pub(crate) fn level_weights(&self, level: u32) -> impl Iterator<Item = (&BasisId, f64)> {
        let lo = BasisId::new(level, first_center(level)).expect("valid level");
        self.weights
            .range(lo..)
            .take_while(move |(id, _)| id.level() == level)
            .map(|(id, &w)| (id, w))
    }

    /// Estimates `f^(1)(x), ..., f^(pr)(x)`.
    pub fn realize_all_levels(&self, x: f64) -> Result<Vec<f64>> {
        let x = check_perception(x)?;
        let mut acc = 0.0;
        Ok((1..=self.pr)
            .map(|k| {
                acc += self.level_sum(x, k);
                acc
            })
            .collect())
    }

    /// Contribution of level `k >= 2` at `x`, i.e. `f^(k)(x) - f^(k-1)(x)`.
    pub fn level_difference(&self, x: f64, k: u32) -> Result<f64> {
        let x = check_perception(x)?;
        self.check_level(k, 2)?;
        Ok(self.level_sum(x, k))
    }

    /// Drops every correction weight with magnitude below `epsilon`.
    pub fn truncate(&self, epsilon: f64) -> Result<Truncation> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return domain(format!("truncation threshold {epsilon} must be nonnegative"));
        }
        let mut model = self.clone();
        let mut removed = 0;
        let mut error_bound = 0.0;
        model.weights.retain(|id, w| {
            let keep = id.level() == 1 || w.abs() >= epsilon;
            if !keep {
                removed += 1;
                error_bound += w.abs();
            }
            keep
        });
        Ok(Truncation {
            model,
            removed,
            error_bound,
        })
    }

    /// Weights outside their nominal ranges: `[0, 1]` at level 1 and
    /// `[-1, +1]` for corrections.
    pub fn range_warnings(&self) -> Vec<String> {
        self.weights
            .iter()
            .filter_map(|(id, &w)| {
                let (lo, hi) = if id.level() == 1 { (0.0, 1.0) } else { (-1.0, 1.0) };
                (w < lo - RANGE_SLACK || w > hi + RANGE_SLACK)
                    .then(|| format!("weight of {id} = {w} is outside [{lo}, {hi}]"))
            })
            .collect()
    }

    /// Weight count per level, index 0 holding level 1.
    pub fn weights_per_level(&self) -> Vec<usize> {
        let mut counts = vec![0; self.pr as usize];
        for id in self.weights.keys() {
            counts[id.level() as usize - 1] += 1;
        }
        counts
    }

    pub fn to_document(&self) -> Result<ModelDocument> {
        let perceptlet = match self.perceptlet {
            Perceptlet::Linear | Perceptlet::Sin => self.perceptlet.name().to_owned(),
            Perceptlet::Custom { ref name, .. } => {
                return Err(Error::Format(format!(
                    "custom percept-let {name:?} cannot be serialized"
                )))
            }
        };
        Ok(ModelDocument {
            perceptlet,
            pr: self.pr,
            weights: self
                .weights
                .iter()
                .map(|(id, &w)| WeightRecord {
                    level: id.level(),
                    center_num: id.center().num(),
                    center_den: id.center().den(),
                    w,
                })
                .collect(),
            version: FORMAT_VERSION,
        })
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        if doc.version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(doc.version));
        }
        let perceptlet = Perceptlet::from_name(&doc.perceptlet).map_err(|e| Error::Format(e.to_string()))?;
        let mut model = Self::new(perceptlet, doc.pr).map_err(|e| Error::Format(e.to_string()))?;
        for (i, r) in doc.weights.iter().enumerate() {
            let bad = |why: String| Error::Format(format!("weight record {i}: {why}"));
            let center = Dyadic::new(r.center_num, r.center_den).map_err(|e| bad(e.to_string()))?;
            let id = BasisId::new(r.level, center).map_err(|e| bad(e.to_string()))?;
            if model.weights.contains_key(&id) {
                return Err(bad(format!("duplicate weight for {id}")));
            }
            model.set_weight(id, r.w).map_err(|e| bad(e.to_string()))?;
        }
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_document()?).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_document(&doc)
    }
}

fn first_center(level: u32) -> Dyadic {
    match level {
        1 => Dyadic::MINUS_ONE,
        2 => Dyadic::ZERO,
        l => {
            let den = 1u64 << (l - 2);
            Dyadic::new(1 - den as i64, den).expect("power of two")
        }
    }
}

/// Result of [`PerceptionModel::truncate`].
#[derive(Debug, Clone)]
pub struct Truncation {
    pub model: PerceptionModel,
    pub removed: usize,
    /// Sum of removed magnitudes; every basis peaks at 1, so no evaluation
    /// moves by more than this.
    pub error_bound: f64,
}

/// On-disk form of a [`PerceptionModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub perceptlet: String,
    pub pr: u32,
    pub weights: Vec<WeightRecord>,
    pub version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRecord {
    pub level: u32,
    pub center_num: i64,
    pub center_den: u64,
    pub w: f64,
}

/// Number of bases of levels `1..=pr`: `2^(pr-1) + 1`.
pub fn basis_count(pr: u32) -> Result<usize> {
    match pr {
        0 => domain("perception resolution must be at least 1"),
        1 => Ok(2),
        p if p > MAX_LEVEL => domain(format!("perception resolution {p} exceeds {MAX_LEVEL}")),
        p => Ok((1usize << (p - 1)) + 1),
    }
}

/// Resolution whose full grid has exactly `n_samples` nodes.
pub fn resolution_for(n_samples: usize) -> Result<u32> {
    if n_samples < 2 || !(n_samples - 1).is_power_of_two() {
        return domain(format!(
            "{n_samples} samples do not fill a dyadic grid (N - 1 must be a power of two); \
             pad the samples or use neighborhood mode"
        ));
    }
    Ok(1 + (n_samples - 1).trailing_zeros())
}

/// Maps a real quantity into perception space with `tanh`.
pub fn to_perception_space(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return domain(format!("{y} is not a finite real"));
    }
    Ok(y.tanh())
}

/// Inverse of [`to_perception_space`]; undefined at the extremes.
pub fn from_perception_space(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > -1.0 && x < 1.0) {
        return domain(format!("{x} has no finite preimage (must lie in (-1, +1))"));
    }
    Ok(x.atanh())
}

/// Every basis of `1..=pr` paired with weight 0.
pub(crate) fn zero_weights(pr: u32) -> Result<BTreeMap<BasisId, f64>> {
    Ok(bases_through(pr)?.into_iter().map(|id| (id, 0.0)).collect())
}

impl PerceptionModel {
    pub(crate) fn from_parts(perceptlet: Perceptlet, pr: u32, weights: BTreeMap<BasisId, f64>) -> Self {
        PerceptionModel {
            perceptlet,
            pr,
            weights,
        }
    }

    pub(crate) fn weights_mut(&mut self) -> &mut BTreeMap<BasisId, f64> {
        &mut self.weights
    }
}
