//! Plasticity rules as pure functions of one neuron's state.
//!
//! The network engine applies the same arithmetic in place; these versions
//! operate on [`NeuronState`] so each rule can be checked in isolation.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};
use crate::scoring::{penalty_gradient, regularizer_cost, ScoringConfig};
use crate::state::{StateVector, WeightVector};

/// Snapshot of a single neuron, with both weight banks indexed by presynaptic
/// neuron over the whole network.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronState {
    pub voltage: f64,
    pub trace: f64,
    pub w_ff: WeightVector,
    pub w_fb: WeightVector,
    pub spiked: bool,
}

impl NeuronState {
    /// The postsynaptic factor used by the hidden-layer rules.
    pub fn post_factor(&self, use_trace: bool) -> f64 {
        if use_trace {
            self.trace
        } else if self.spiked {
            1.0
        } else {
            0.0
        }
    }
}

/// `Δw_ij = lr · <w_fb, x> · x_i · post` on the feedforward mask.
pub fn learn_ff(neuron: &NeuronState, x: &StateVector, post: f64, lr: f64) -> Result<Vec<f64>> {
    let fb = neuron.w_fb.dot(x)?;
    let mut delta = vec![0.0; x.len()];
    if fb == 0.0 || post == 0.0 {
        return Ok(delta);
    }
    for i in neuron.w_ff.active() {
        if x.get(i) {
            delta[i] = lr * fb * post;
        }
    }
    Ok(delta)
}

/// `Δw_kj = lr · (<w_ff, x> - theta) · x_k · post` on the feedback mask.
pub fn learn_fb(neuron: &NeuronState, x: &StateVector, theta: f64, post: f64, lr: f64) -> Result<Vec<f64>> {
    let margin = neuron.w_ff.dot(x)? - theta;
    let mut delta = vec![0.0; x.len()];
    if post == 0.0 {
        return Ok(delta);
    }
    for k in neuron.w_fb.active() {
        if x.get(k) {
            delta[k] = lr * margin * post;
        }
    }
    Ok(delta)
}

/// `Δw_ij = lr · reward · cospikes_ij`.
pub fn learn_m(reward: f64, cospikes: &[u32], lr: f64) -> Vec<f64> {
    cospikes.iter().map(|&c| lr * reward * c as f64).collect()
}

/// Attention-gated reinforcement update for one feedforward edge.
pub fn agrel_update(lr: f64, w_fb_kj: f64, x_k: f64, x_i: f64, x_j: f64, f_delta: f64) -> f64 {
    lr * w_fb_kj * x_k * x_i * x_j * (1.0 - x_j) * f_delta
}

/// `-lr · ∂A(w)` on the active mask.
pub fn penalty_delta(w: &WeightVector, cfg: &ScoringConfig, lr: f64) -> Vec<f64> {
    let mut delta = vec![0.0; w.len()];
    for i in w.active() {
        delta[i] = -lr * penalty_gradient(cfg, w.get(i));
    }
    delta
}

/// `<w_fb, x> · (<w_ff, x> - theta) · 1_j - A(w_ff) - A(w_fb)`.
pub fn feedback_score(neuron: &NeuronState, x: &StateVector, cfg: &ScoringConfig) -> Result<f64> {
    check_len(neuron.w_ff.len(), x.len())?;
    let cost = regularizer_cost(cfg, &neuron.w_ff)? + regularizer_cost(cfg, &neuron.w_fb)?;
    if !neuron.spiked {
        return Ok(-cost);
    }
    let fb = neuron.w_fb.dot(x)?;
    let margin = neuron.w_ff.dot(x)? - cfg.theta;
    Ok(fb * margin - cost)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruningReport {
    pub neurons: usize,
    pub kept: usize,
    pub pruned: usize,
}

impl PruningReport {
    pub fn merge(&mut self, other: PruningReport) {
        self.neurons += other.neurons;
        self.kept += other.kept;
        self.pruned += other.pruned;
    }
}

/// Indices of the `k` largest weights; ties go to the lower index.
pub fn top_k(weights: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Sets the `k` strongest weights to 1 and the rest to 0.
pub fn sleep_regularize(weights: &mut [f64], k: usize) -> PruningReport {
    let keep = top_k(weights, k);
    weights.iter_mut().for_each(|w| *w = 0.0);
    for &i in &keep {
        weights[i] = 1.0;
    }
    PruningReport {
        neurons: 1,
        kept: keep.len(),
        pruned: weights.len() - keep.len(),
    }
}
