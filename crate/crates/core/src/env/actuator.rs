//! Motor areas that engage when their recent spike count crosses a threshold.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuatorConfig {
    pub areas: usize,
    pub area_size: usize,
    /// An area engages when it fired more than this many spikes in the window.
    pub threshold: usize,
    pub window: usize,
}

impl Default for ActuatorConfig {
    fn default() -> Self {
        Self {
            areas: 8,
            area_size: 10,
            threshold: 10,
            window: 5,
        }
    }
}

impl ActuatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.areas == 0 || self.area_size == 0 || self.window == 0 {
            return Err(Error::Config("actuator areas, area_size and window must be positive".into()));
        }
        Ok(())
    }
}

/// Sliding-window spike counters, one per area.
#[derive(Clone, Debug)]
pub struct ActuatorBank {
    cfg: ActuatorConfig,
    recent: VecDeque<Vec<usize>>,
    totals: Vec<usize>,
}

impl ActuatorBank {
    pub fn new(cfg: ActuatorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            recent: VecDeque::with_capacity(cfg.window + 1),
            totals: vec![0; cfg.areas],
            cfg,
        })
    }

    pub fn config(&self) -> &ActuatorConfig {
        &self.cfg
    }

    /// Local neuron range of an area within the motor layer.
    pub fn area_range(&self, area: usize) -> std::ops::Range<usize> {
        area * self.cfg.area_size..(area + 1) * self.cfg.area_size
    }

    /// Records one tic of motor spikes (local indices) and returns which
    /// areas are engaged.
    pub fn push(&mut self, motor_spikes: &[u32]) -> Vec<bool> {
        let mut counts = vec![0; self.cfg.areas];
        for &j in motor_spikes {
            let area = j as usize / self.cfg.area_size;
            if area < self.cfg.areas {
                counts[area] += 1;
            }
        }
        for (t, c) in self.totals.iter_mut().zip(&counts) {
            *t += c;
        }
        self.recent.push_back(counts);
        if self.recent.len() > self.cfg.window {
            let old = self.recent.pop_front().expect("window is non-empty");
            for (t, c) in self.totals.iter_mut().zip(old) {
                *t -= c;
            }
        }
        self.totals.iter().map(|&t| t > self.cfg.threshold).collect()
    }

    pub fn window_counts(&self) -> &[usize] {
        &self.totals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engages_above_threshold_in_window() {
        let mut bank = ActuatorBank::new(ActuatorConfig::default()).unwrap();
        // area 2 fires 3 spikes per tic
        let spikes = [20, 21, 22];
        assert_eq!(bank.push(&spikes)[2], false);
        assert_eq!(bank.push(&spikes)[2], false);
        assert_eq!(bank.push(&spikes)[2], false);
        assert_eq!(bank.push(&spikes)[2], true); // 12 > 10
        for _ in 0..4 {
            bank.push(&[]);
        }
        assert_eq!(bank.push(&[])[2], false);
        assert_eq!(bank.window_counts()[2], 0);
    }

    #[test]
    fn exactly_threshold_does_not_engage() {
        let mut bank = ActuatorBank::new(ActuatorConfig::default()).unwrap();
        let ten: Vec<u32> = (0..10).collect();
        assert_eq!(bank.push(&ten)[0], false);
        assert_eq!(bank.push(&[0])[0], true);
    }
}
