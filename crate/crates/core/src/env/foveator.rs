//! Moving a fovea onto an object that appears at the edge of the retina.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::Utility;
use crate::state::StateVector;
use crate::utility::task_reward;

use super::{cell, Environment, Step};

/// Compass moves of the fovea, in area order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Move {
    pub const ALL: [Move; 8] = [Move::N, Move::NE, Move::E, Move::SE, Move::S, Move::SW, Move::W, Move::NW];

    /// Fovea displacement as (columns east, rows south).
    pub fn offset(self) -> (i32, i32) {
        match self {
            Move::N => (0, -1),
            Move::NE => (1, -1),
            Move::E => (1, 0),
            Move::SE => (1, 1),
            Move::S => (0, 1),
            Move::SW => (-1, 1),
            Move::W => (-1, 0),
            Move::NW => (-1, -1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoveatorConfig {
    pub grid: usize,
    /// Tics before an unfinished episode is abandoned.
    pub timeout: usize,
    /// Blank tics between episodes.
    pub gap: usize,
}

impl Default for FoveatorConfig {
    fn default() -> Self {
        Self {
            grid: 20,
            timeout: 60,
            gap: 0,
        }
    }
}

impl FoveatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 4 || self.grid % 2 != 0 || self.timeout == 0 {
            return Err(Error::Config(format!(
                "foveator needs an even grid of at least 4 and a positive timeout, got grid {} timeout {}",
                self.grid, self.timeout
            )));
        }
        Ok(())
    }

    /// Largest object offset that still renders inside the retina.
    pub fn reach(&self) -> i32 {
        (self.grid / 2) as i32 - 1
    }
}

#[derive(Clone, Debug)]
pub struct FoveatorWorld {
    cfg: FoveatorConfig,
    rng: ChaCha8Rng,
    /// Object position relative to the fovea, or `None` between episodes.
    object: Option<(i32, i32)>,
    age: usize,
    blank_left: usize,
    episodes: u64,
    centered: u64,
}

fn dist2((x, y): (i32, i32)) -> i32 {
    x * x + y * y
}

impl FoveatorWorld {
    pub fn new(cfg: FoveatorConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut world = Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            object: None,
            age: 0,
            blank_left: 0,
            episodes: 0,
            centered: 0,
        };
        world.start_episode();
        Ok(world)
    }

    /// Places the object at a fixed offset, for probes.
    pub fn place(&mut self, dx: i32, dy: i32) {
        let r = self.cfg.reach();
        self.object = Some((dx.clamp(-r, r), dy.clamp(-r, r)));
        self.age = 0;
        self.episodes += 1;
    }

    fn start_episode(&mut self) {
        let r = self.cfg.reach();
        let side = if self.rng.gen_bool(0.5) { r } else { -r };
        let other = self.rng.gen_range(-r..=r);
        if self.rng.gen_bool(0.5) {
            self.place(side, other);
        } else {
            self.place(other, side);
        }
    }

    pub fn object(&self) -> Option<(i32, i32)> {
        self.object
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    /// Episodes that ended with the object on the fovea.
    pub fn centered(&self) -> u64 {
        self.centered
    }
}

impl Environment for FoveatorWorld {
    fn areas(&self) -> usize {
        8
    }

    fn sensory_size(&self) -> usize {
        self.cfg.grid * self.cfg.grid
    }

    fn observe(&self) -> StateVector {
        let mut x = StateVector::zeros(self.sensory_size());
        if let Some((dx, dy)) = self.object {
            let c = (self.cfg.grid / 2) as i32;
            for r in c + dy - 1..=c + dy {
                for col in c + dx - 1..=c + dx {
                    x.set(cell(self.cfg.grid, r as usize, col as usize), true);
                }
            }
        }
        x
    }

    fn step(&mut self, engaged: &[bool]) -> Step {
        let mut rewards = vec![None; self.areas()];
        if let Some(obj) = self.object {
            let r = self.cfg.reach();
            let shift = |(mx, my): (i32, i32)| ((obj.0 - mx).clamp(-r, r), (obj.1 - my).clamp(-r, r));
            let mut total = (0, 0);
            for (a, m) in Move::ALL.iter().enumerate() {
                if !engaged.get(a).copied().unwrap_or(false) {
                    continue;
                }
                let (mx, my) = m.offset();
                total = (total.0 + mx, total.1 + my);
                // each area is judged on its own move
                let closer = dist2(shift((mx, my))) < dist2(obj);
                rewards[a] = Some(task_reward(closer));
            }
            let next = shift(total);
            self.age += 1;
            if next == (0, 0) {
                self.centered += 1;
            }
            if next == (0, 0) || self.age >= self.cfg.timeout {
                self.object = None;
                self.blank_left = self.cfg.gap;
            } else {
                self.object = Some(next);
            }
        } else {
            self.blank_left = self.blank_left.saturating_sub(1);
        }
        if self.object.is_none() && self.blank_left == 0 {
            self.start_episode();
        }
        let rewards: Vec<Option<Utility>> = rewards;
        Step {
            input: self.observe(),
            rewards,
        }
    }
}
