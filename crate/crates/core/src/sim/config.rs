use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::ScoringConfig;

/// How hidden layers turn feedback into feedforward updates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenRule {
    /// `Δw_ij ∝ <w_fb, x> · x_i · trace_j`, feedback bank aligned to the margin.
    #[default]
    Feedback,
    /// Attention-gated reinforcement baseline with real-valued activity.
    Agrel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub theta: f64,
    /// Voltage leak per tic.
    pub delta: f64,
    /// Per-layer leak overrides, by layer name.
    pub layer_delta: BTreeMap<String, f64>,
    pub trace_decay: f64,
    pub trace_increment: f64,
    pub lr_ff: f64,
    pub lr_fb: f64,
    pub lr_m: f64,
    /// Longest run of tics credited by one neuromodulatory event.
    pub m_window: usize,
    /// Use the spike trace as postsynaptic factor; `false` uses the raw spike.
    pub trace_learning: bool,
    pub hidden_rule: HiddenRule,
    /// Per-tic regularizer gradient. Only applied while sleep is disabled.
    pub penalty: Option<ScoringConfig>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            delta: 0.05,
            layer_delta: BTreeMap::new(),
            trace_decay: 0.95,
            trace_increment: 0.4,
            lr_ff: 0.01,
            lr_fb: 0.01,
            lr_m: 0.01,
            m_window: 5,
            trace_learning: true,
            hidden_rule: HiddenRule::Feedback,
            penalty: None,
        }
    }
}

impl DynamicsConfig {
    pub fn delta_for(&self, layer: &str) -> f64 {
        self.layer_delta.get(layer).copied().unwrap_or(self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("dynamics.{name} must be positive, got {v}")))
            }
        };
        if !self.theta.is_finite() {
            return Err(Error::Config("dynamics.theta must be finite".into()));
        }
        for (name, &d) in std::iter::once((&"default".to_string(), &self.delta)).chain(&self.layer_delta) {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Config(format!("leak for {name} must be non-negative, got {d}")));
            }
        }
        if !(self.trace_decay > 0.0 && self.trace_decay < 1.0) {
            return Err(Error::Config(format!(
                "dynamics.trace_decay must lie in (0,1), got {}",
                self.trace_decay
            )));
        }
        if !(self.trace_increment.is_finite() && self.trace_increment >= 0.0) {
            return Err(Error::Config("dynamics.trace_increment must be non-negative".into()));
        }
        positive("lr_ff", self.lr_ff)?;
        positive("lr_fb", self.lr_fb)?;
        positive("lr_m", self.lr_m)?;
        if self.m_window == 0 {
            return Err(Error::Config("dynamics.m_window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Periodic top-K binarization of plastic synapses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SleepConfig {
    /// Tics between regularization events; 0 disables sleep.
    pub interval: u64,
    /// Feedforward synapses kept per neuron, by layer name.
    pub k_ff: BTreeMap<String, usize>,
    /// Feedback synapses kept per neuron, by layer name.
    pub k_fb: BTreeMap<String, usize>,
    pub regularize_feedback: bool,
}

impl Default for SleepConfig {
    fn default() -> Self {
        let k_ff = [("V", 20), ("D", 20), ("M", 15)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let k_fb = [("V", 5), ("D", 5)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self {
            interval: 1000,
            k_ff,
            k_fb,
            regularize_feedback: true,
        }
    }
}

impl SleepConfig {
    pub fn disabled() -> Self {
        Self {
            interval: 0,
            ..Self::default()
        }
    }

    pub fn enabled(&self) -> bool {
        self.interval > 0
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((layer, _)) = self.k_ff.iter().chain(&self.k_fb).find(|(_, &k)| k == 0) {
            return Err(Error::Config(format!("sleep K for layer {layer} must be at least 1")));
        }
        Ok(())
    }
}
