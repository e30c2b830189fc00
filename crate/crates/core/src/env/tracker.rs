//! A square target running along one edge of the sensory grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::Utility;
use crate::state::StateVector;
use crate::utility::task_reward;

use super::{cell, Environment, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Top,
    Right,
    Bottom,
    Left,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Top, Edge::Right, Edge::Bottom, Edge::Left];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub grid: usize,
    pub target: usize,
    /// Cells advanced per tic.
    pub speed: usize,
    /// Blank tics between episodes.
    pub gap: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            grid: 20,
            target: 2,
            speed: 1,
            gap: 20,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target == 0 || self.target >= self.grid || self.speed == 0 {
            return Err(Error::Config(format!(
                "tracker needs 0 < target < grid and speed > 0, got target {} grid {} speed {}",
                self.target, self.grid, self.speed
            )));
        }
        Ok(())
    }

    /// Positions along the edge visited in one sweep.
    pub fn sweep_len(&self) -> usize {
        (self.grid - self.target) / self.speed + 1
    }
}

/// Area index for an (edge, direction) pair; `forward` means increasing
/// row or column index.
pub fn tracker_area(edge: Edge, forward: bool) -> usize {
    let e = Edge::ALL.iter().position(|&x| x == edge).expect("edge listed");
    2 * e + usize::from(!forward)
}

#[derive(Clone, Debug)]
pub struct TrackerWorld {
    cfg: TrackerConfig,
    rng: ChaCha8Rng,
    edge: Edge,
    forward: bool,
    /// Step within the current sweep, or `None` during the blank gap.
    step: Option<usize>,
    blank_left: usize,
    episodes: u64,
}

impl TrackerWorld {
    pub fn new(cfg: TrackerConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut world = Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            edge: Edge::Top,
            forward: true,
            step: None,
            blank_left: 0,
            episodes: 0,
        };
        world.start_episode();
        Ok(world)
    }

    /// Starts a fixed episode, for probes.
    pub fn start(&mut self, edge: Edge, forward: bool) {
        self.edge = edge;
        self.forward = forward;
        self.step = Some(0);
        self.blank_left = 0;
        self.episodes += 1;
    }

    fn start_episode(&mut self) {
        let edge = Edge::ALL[self.rng.gen_range(0..4)];
        let forward = self.rng.gen_bool(0.5);
        self.start(edge, forward);
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    /// The area that is correct right now. The label of the last sweep
    /// persists through the blank gap that follows it.
    pub fn correct_area(&self) -> usize {
        tracker_area(self.edge, self.forward)
    }

    pub fn target_visible(&self) -> bool {
        self.step.is_some()
    }

    /// Top-left corner of the target, if visible.
    pub fn target_corner(&self) -> Option<(usize, usize)> {
        let step = self.step?;
        let span = self.cfg.grid - self.cfg.target;
        let along = if self.forward {
            step * self.cfg.speed
        } else {
            span - step * self.cfg.speed
        };
        Some(match self.edge {
            Edge::Top => (0, along),
            Edge::Bottom => (span, along),
            Edge::Left => (along, 0),
            Edge::Right => (along, span),
        })
    }
}

impl Environment for TrackerWorld {
    fn areas(&self) -> usize {
        8
    }

    fn sensory_size(&self) -> usize {
        self.cfg.grid * self.cfg.grid
    }

    fn observe(&self) -> StateVector {
        let mut x = StateVector::zeros(self.sensory_size());
        if let Some((r0, c0)) = self.target_corner() {
            for r in r0..r0 + self.cfg.target {
                for c in c0..c0 + self.cfg.target {
                    x.set(cell(self.cfg.grid, r, c), true);
                }
            }
        }
        x
    }

    fn step(&mut self, engaged: &[bool]) -> Step {
        let correct = self.correct_area();
        let rewards: Vec<Option<Utility>> = (0..self.areas())
            .map(|a| engaged.get(a).copied().unwrap_or(false).then(|| task_reward(a == correct)))
            .collect();
        match self.step {
            Some(s) if s + 1 < self.cfg.sweep_len() => self.step = Some(s + 1),
            Some(_) => {
                self.step = None;
                self.blank_left = self.cfg.gap;
                if self.blank_left == 0 {
                    self.start_episode();
                }
            }
            None => {
                self.blank_left = self.blank_left.saturating_sub(1);
                if self.blank_left == 0 {
                    self.start_episode();
                }
            }
        }
        Step {
            input: self.observe(),
            rewards,
        }
    }
}
