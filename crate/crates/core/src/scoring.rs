//! Threshold neurons and their regularized scoring rules.
//!
//! A neuron with weights `w` and threshold `theta` spikes on `x` iff
//! `<w, x> - theta > 0`. Its reward is `mu * (<w, x> - theta) * spike`, and the
//! score subtracts a resource cost `A(w)` chosen from three regularizers:
//!
//! | regularizer | cost                     | penalty gradient     | link `G(v)`        |
//! |-------------|--------------------------|----------------------|--------------------|
//! | `L2`        | `‖w‖² / 2η`              | `w / η`              | `η v`              |
//! | `LH`        | `Σ w log w / η`          | `(log w + 1) / η`    | `exp(η v - 1)`     |
//! | `L1`        | `‖w‖₁ / η`, `w ∈ [0,1]`  | `1 / η`              | `1[η v > 1]`       |
//!
//! All sums run over the synapses present in the weight mask.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::state::{StateVector, WeightVector};

/// Numerical floor applied to `LH` weights before taking logarithms.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regularizer {
    L2,
    LH,
    L1,
}

impl Regularizer {
    pub const ALL: [Regularizer; 3] = [Regularizer::L2, Regularizer::LH, Regularizer::L1];
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularizer::L2 => "l2",
            Regularizer::LH => "lH",
            Regularizer::L1 => "l1",
        })
    }
}

impl std::str::FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Regularizer::L2),
            "lh" => Ok(Regularizer::LH),
            "l1" => Ok(Regularizer::L1),
            other => Err(Error::Parse(format!("unknown regularizer `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub regularizer: Regularizer,
    pub eta: f64,
    pub theta: f64,
}

impl ScoringConfig {
    pub fn new(regularizer: Regularizer, eta: f64, theta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Config(format!("eta must be positive, got {eta}")));
        }
        if !theta.is_finite() {
            return Err(Error::Config(format!("theta must be finite, got {theta}")));
        }
        Ok(Self {
            regularizer,
            eta,
            theta,
        })
    }
}

/// Utility `mu(x)` attached to an outcome.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Utility(f64);

impl Utility {
    pub const ZERO: Utility = Utility(0.0);
    pub const ONE: Utility = Utility(1.0);
    pub const MINUS_ONE: Utility = Utility(-1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Config(format!("utility must be finite, got {value}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Utility {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Utility::new(value)
    }
}

impl From<Utility> for f64 {
    fn from(u: Utility) -> f64 {
        u.0
    }
}

/// How the reward term of the gradient is gated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMode {
    /// Gradient of the full score: the reward term is spike-gated, the
    /// regularizer penalty always applies.
    #[default]
    FullScore,
    /// Plain cospike rule: nothing changes unless the neuron spikes.
    CospikeOnly,
}

/// `<w, x> - theta`.
pub fn margin(w: &WeightVector, x: &StateVector, theta: f64) -> Result<f64> {
    Ok(w.dot(x)? - theta)
}

/// Threshold output. The kink `<w, x> = theta` resolves to "no spike".
pub fn activate(w: &WeightVector, x: &StateVector, theta: f64) -> Result<bool> {
    Ok(margin(w, x, theta)? > 0.0)
}

/// Utility times margin times selectivity.
pub fn reward(x: &StateVector, w: &WeightVector, mu: Utility, theta: f64) -> Result<f64> {
    let m = margin(w, x, theta)?;
    Ok(if m > 0.0 { mu.get() * m } else { 0.0 })
}

fn check_domain(cfg: &ScoringConfig, i: usize, wi: f64) -> Result<()> {
    let ok = match cfg.regularizer {
        Regularizer::L2 => wi.is_finite(),
        Regularizer::LH => wi.is_finite() && wi >= 0.0,
        Regularizer::L1 => (0.0..=1.0).contains(&wi),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            index: i,
            value: wi,
            regularizer: cfg.regularizer,
        })
    }
}

/// Cost of a single synapse.
pub fn synapse_cost(cfg: &ScoringConfig, wi: f64) -> f64 {
    match cfg.regularizer {
        Regularizer::L2 => wi * wi / (2.0 * cfg.eta),
        Regularizer::LH => {
            let w = wi.max(WEIGHT_FLOOR);
            w * w.ln() / cfg.eta
        }
        Regularizer::L1 => wi.abs() / cfg.eta,
    }
}

/// `A(w)` summed over the active mask.
pub fn regularizer_cost(cfg: &ScoringConfig, w: &WeightVector) -> Result<f64> {
    let mut total = 0.0;
    for i in w.active() {
        let wi = w.get(i);
        check_domain(cfg, i, wi)?;
        total += synapse_cost(cfg, wi);
    }
    Ok(total)
}

/// Reward minus regularizer cost.
pub fn score(x: &StateVector, w: &WeightVector, mu: Utility, cfg: &ScoringConfig) -> Result<f64> {
    Ok(reward(x, w, mu, cfg.theta)? - regularizer_cost(cfg, w)?)
}

/// Share of the score paid to synapse `i`.
///
/// The threshold is split evenly over the active synapses so that the shares
/// add up to [`score`] exactly.
pub fn synapse_score(
    x: &StateVector,
    w: &WeightVector,
    mu: Utility,
    cfg: &ScoringConfig,
    i: usize,
) -> Result<f64> {
    check_len(w.len(), x.len())?;
    if !w.is_active(i) {
        return Ok(0.0);
    }
    let wi = w.get(i);
    check_domain(cfg, i, wi)?;
    let spike = activate(w, x, cfg.theta)?;
    let share = cfg.theta / w.active_count() as f64;
    let contribution = if x.get(i) { wi } else { 0.0 };
    let payout = if spike {
        (contribution - share) * mu.get()
    } else {
        0.0
    };
    Ok(payout - synapse_cost(cfg, wi))
}

/// `dA/dw_i`.
pub fn penalty_gradient(cfg: &ScoringConfig, wi: f64) -> f64 {
    match cfg.regularizer {
        Regularizer::L2 => wi / cfg.eta,
        Regularizer::LH => (wi.max(WEIGHT_FLOOR).ln() + 1.0) / cfg.eta,
        Regularizer::L1 => 1.0 / cfg.eta,
    }
}

/// Projects a weight back into the regularizer's domain.
pub fn project(cfg: &ScoringConfig, wi: f64) -> f64 {
    match cfg.regularizer {
        Regularizer::L2 => wi,
        Regularizer::LH => wi.max(WEIGHT_FLOOR),
        Regularizer::L1 => wi.clamp(0.0, 1.0),
    }
}

/// Gradient of the score with respect to each weight (zero off the mask).
pub fn score_gradient(
    cfg: &ScoringConfig,
    w: &WeightVector,
    x: &StateVector,
    mu: Utility,
    mode: GradientMode,
) -> Result<Vec<f64>> {
    let spike = activate(w, x, cfg.theta)?;
    let mut grad = vec![0.0; w.len()];
    if mode == GradientMode::CospikeOnly && !spike {
        return Ok(grad);
    }
    for i in w.active() {
        let reward_term = if spike && x.get(i) { mu.get() } else { 0.0 };
        grad[i] = reward_term - penalty_gradient(cfg, w.get(i));
    }
    Ok(grad)
}

/// One online ascent step on the full score, projected onto the domain.
pub fn grad_update(
    cfg: &ScoringConfig,
    w: &WeightVector,
    x: &StateVector,
    mu: Utility,
    lr: f64,
) -> Result<WeightVector> {
    grad_update_with(cfg, w, x, mu, lr, GradientMode::FullScore)
}

pub fn grad_update_with(
    cfg: &ScoringConfig,
    w: &WeightVector,
    x: &StateVector,
    mu: Utility,
    lr: f64,
    mode: GradientMode,
) -> Result<WeightVector> {
    let grad = score_gradient(cfg, w, x, mu, mode)?;
    let mut next = w.clone();
    for i in w.active() {
        next.set(i, project(cfg, w.get(i) + lr * grad[i]));
    }
    Ok(next)
}

/// Link between expected gated utility and optimal weight, one coordinate.
pub fn g_scalar(cfg: &ScoringConfig, v: f64) -> f64 {
    match cfg.regularizer {
        Regularizer::L2 => cfg.eta * v,
        Regularizer::LH => (cfg.eta * v - 1.0).exp(),
        // a tie at exactly 1 maps to 0
        Regularizer::L1 => {
            if cfg.eta * v > 1.0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

pub fn g_map(cfg: &ScoringConfig, v: &[f64]) -> Vec<f64> {
    v.iter().map(|&vi| g_scalar(cfg, vi)).collect()
}
