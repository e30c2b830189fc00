//! Sensorimotor tasks: worlds that render onto the sensory grid and judge
//! motor engagements.

pub mod actuator;
pub mod foveator;
pub mod metrics;
pub mod tracker;

pub use actuator::{ActuatorBank, ActuatorConfig};
pub use foveator::{FoveatorConfig, FoveatorWorld, Move};
pub use metrics::Metrics;
pub use tracker::{tracker_area, Edge, TrackerConfig, TrackerWorld};

use crate::scoring::Utility;
use crate::state::StateVector;

/// Result of advancing a world by one tic.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    /// Sensory drive for the next tic.
    pub input: StateVector,
    /// Reward per area; `None` for areas that did not engage.
    pub rewards: Vec<Option<Utility>>,
}

pub trait Environment {
    fn areas(&self) -> usize;

    fn sensory_size(&self) -> usize;

    /// Sensory drive for the current tic.
    fn observe(&self) -> StateVector;

    /// Judges the engagements made against the current tic, then advances.
    fn step(&mut self, engaged: &[bool]) -> Step;
}

/// Row-major index on a square grid.
pub(crate) fn cell(grid: usize, row: usize, col: usize) -> usize {
    row * grid + col
}
