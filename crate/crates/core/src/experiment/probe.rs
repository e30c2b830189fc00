//! Run-long usefulness statistics between a hidden layer and the motor layer.

use serde::{Deserialize, Serialize};

use crate::env::ActuatorBank;
use crate::error::{Error, Result};
use crate::lab::UsefulnessEstimator;
use crate::scoring::{ScoringConfig, Utility};
use crate::sim::{Network, ProjectionKind};

use super::build::MOTOR;

/// Accumulates the usefulness estimator for `via -> M` every tic.
#[derive(Clone, Debug)]
pub struct UsefulnessProbe {
    via: usize,
    motor: usize,
    estimator: UsefulnessEstimator,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsefulnessReport {
    pub tics: u64,
    /// Mean `|G(E[mu_k 1_jk]) - G(E[<w_j,x> 1_jk])|` over cospiking pairs.
    pub mean_abs_gap: f64,
    /// Mean `|w_jk|` over the feedforward synapses from `via` to M.
    pub mean_weight: f64,
}

impl UsefulnessReport {
    pub fn relative_gap(&self) -> f64 {
        if self.mean_weight == 0.0 {
            f64::INFINITY
        } else {
            self.mean_abs_gap / self.mean_weight
        }
    }
}

impl UsefulnessProbe {
    pub fn new(net: &Network, via: &str) -> Result<Self> {
        let topo = net.topology();
        let find = |name: &str| {
            topo.layer_index(name)
                .ok_or_else(|| Error::Config(format!("unknown layer `{name}`")))
        };
        let (via, motor) = (find(via)?, find(MOTOR)?);
        Ok(Self {
            via,
            motor,
            estimator: UsefulnessEstimator::new(topo.layers[via].size, topo.layers[motor].size),
        })
    }

    pub fn estimator(&self) -> &UsefulnessEstimator {
        &self.estimator
    }

    /// Records the last tic of `net`; every motor neuron of an area that
    /// received a reward sees that reward as its utility.
    pub fn observe(&mut self, net: &Network, bank: &ActuatorBank, rewards: &[Option<Utility>]) -> Result<()> {
        let up = &net.spiked()[net.layer_range(self.via)];
        let down = &net.spiked()[net.layer_range(self.motor)];
        let drive = &net.ff_drive()[net.layer_range(self.via)];
        let mut utility = vec![0.0; down.len()];
        for (a, r) in rewards.iter().enumerate() {
            if let Some(r) = r {
                utility[bank.area_range(a)].iter_mut().for_each(|u| *u = r.get());
            }
        }
        self.estimator.observe(up, down, drive, &utility)
    }

    pub fn report(&self, net: &Network, cfg: &ScoringConfig) -> UsefulnessReport {
        let (total, n) = net
            .topology()
            .projections
            .iter()
            .filter(|p| p.source == self.via && p.target == self.motor && p.kind == ProjectionKind::Feedforward)
            .flat_map(|p| p.weights().iter())
            .fold((0.0, 0usize), |(t, n), w| (t + w.abs(), n + 1));
        UsefulnessReport {
            tics: self.estimator.tics(),
            mean_abs_gap: self.estimator.mean_abs_gap(cfg),
            mean_weight: if n == 0 { 0.0 } else { total / n as f64 },
        }
    }
}
