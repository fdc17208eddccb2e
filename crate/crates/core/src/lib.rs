//! Perception automata: multi-resolution function approximation over the
//! perception space `[-1, +1]`.
//!
//! A model is a stack of percept-let basis levels. Level 1 captures the
//! straight line between the two extremes, level 2 corrects the midpoint,
//! and each deeper level corrects the odd dyadic midpoints left by the
//! levels before it. Evaluating only the first `k` levels yields a coarser
//! estimate, so one model answers at every resolution.
//!
//! Modules:
//! - [`logic`]: C-bit belonging pairs and their OR/AND/complement algebra.
//! - [`basis`]: percept-let families and the level/center basis hierarchy.
//! - [`model`]: the weighted hierarchy, its evaluation and serialization.
//! - [`learner`]: boundary (grid) learning, recursive least squares and
//!   online training.
//! - [`automaton`]: decomposition, learning and realization phases.

pub mod automaton;
pub mod basis;
pub mod dyadic;
pub mod error;
pub mod learner;
pub mod logic;
pub mod model;

pub use automaton::{Activation, Automaton, AutomatonConfig, InputMapping, Mode, Realization};
pub use basis::{centers_at_level, BasisId, Perceptlet, ValidationReport};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use learner::{
    batch_weight, fit_boundary, fit_neighborhood, fit_neighborhood_with, is_hierarchical_order, FitMode, FitReport,
    NeighborhoodOptions, OnlineTrainer, RlsEstimate, RlsState,
};
pub use logic::{subspace_coordinates, Association, Cbit, Tensor2};
pub use model::{
    basis_count, from_perception_space, resolution_for, to_perception_space, PerceptionModel, Sample, Truncation,
};
