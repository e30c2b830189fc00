//! Deterministic gradient ascent on the expected score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{project, ScoringConfig};
use crate::state::WeightVector;

use super::distribution::DiscreteDistribution;
use super::properness::expected_gradient;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AscentConfig {
    /// Step size at iteration `t` is `lr / (1 + t / decay)`.
    pub lr: f64,
    pub decay: f64,
    pub max_iterations: usize,
    /// Converged once every projected gradient entry is below this.
    pub tolerance: f64,
    /// Trailing iterations inspected for sign flips.
    pub window: usize,
    /// Sign flips within the window that count as oscillation.
    pub min_flips: usize,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            lr: 0.1,
            decay: 1e4,
            max_iterations: 100_000,
            tolerance: 1e-9,
            window: 1000,
            min_flips: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentResult {
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Per synapse, how often the update changed sign in the final window.
    pub sign_flips: Vec<usize>,
    /// Not converged and some synapse kept alternating between
    /// potentiation and depression.
    pub oscillating: bool,
}

/// Follows `E_P[mu x 1_w] - grad A(w)` from `start`, projecting onto the
/// regularizer's domain after every step.
pub fn gradient_ascent(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    start: &WeightVector,
    ascent: &AscentConfig,
) -> Result<AscentResult> {
    if !(ascent.lr > 0.0 && ascent.decay > 0.0 && ascent.tolerance >= 0.0) {
        return Err(Error::Config("ascent lr and decay must be positive".into()));
    }
    let n = start.len();
    let mut w = start.clone();
    for i in w.active().collect::<Vec<_>>() {
        w.set(i, project(cfg, w.get(i)));
    }
    let mut last_sign = vec![0i8; n];
    let mut flips = vec![0usize; n];
    let window_start = ascent.max_iterations.saturating_sub(ascent.window);
    let mut converged = false;
    let mut t = 0;
    while t < ascent.max_iterations {
        let g = expected_gradient(&w, p, cfg)?;
        let lr = ascent.lr / (1.0 + t as f64 / ascent.decay);
        let mut largest: f64 = 0.0;
        let mut next = w.clone();
        for i in w.active() {
            let old = w.get(i);
            let new = project(cfg, old + lr * g[i]);
            let blocked = new == old && g[i] != 0.0;
            if !blocked {
                largest = largest.max(g[i].abs());
            }
            next.set(i, new);
            let sign = (new - old).partial_cmp(&0.0).map_or(0, |o| o as i8);
            if sign != 0 {
                if t >= window_start && last_sign[i] != 0 && sign != last_sign[i] {
                    flips[i] += 1;
                }
                last_sign[i] = sign;
            }
        }
        w = next;
        t += 1;
        if largest <= ascent.tolerance {
            converged = true;
            break;
        }
    }
    let oscillating = !converged && flips.iter().any(|&f| f >= ascent.min_flips.max(1));
    Ok(AscentResult {
        weights: w.as_slice().to_vec(),
        iterations: t,
        converged,
        sign_flips: flips,
        oscillating,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::properness::fixed_point_residual;
    use crate::scoring::Regularizer;

    #[test]
    fn converges_to_fixed_point() {
        let cfg = ScoringConfig::new(Regularizer::L2, 1.0, 0.5).unwrap();
        let p = DiscreteDistribution::from_table(&[(&[1, 0], 0.5, 1.0), (&[1, 1], 0.5, 0.5)]).unwrap();
        let r = gradient_ascent(&p, &cfg, &WeightVector::dense(vec![0.6, 0.1]), &AscentConfig::default()).unwrap();
        assert!(r.converged);
        assert!(!r.oscillating);
        assert!((r.weights[0] - 0.75).abs() < 1e-6 && (r.weights[1] - 0.25).abs() < 1e-6);
        let w = WeightVector::dense(r.weights);
        assert!(fixed_point_residual(&w, &p, &cfg).unwrap() < 1e-6);
    }

    #[test]
    fn hidden_cost_makes_ascent_oscillate() {
        let cfg = ScoringConfig::new(Regularizer::L2, 2.0, 0.5).unwrap();
        let p = DiscreteDistribution::from_table(&[(&[1, 1], 0.5, 1.0), (&[1, 0], 0.5, -10.0)]).unwrap();
        let r = gradient_ascent(&p, &cfg, &WeightVector::dense(vec![0.25, 1.0]), &AscentConfig::default()).unwrap();
        assert!(!r.converged);
        assert!(r.oscillating, "{r:?}");
        let w = WeightVector::dense(r.weights);
        assert!(fixed_point_residual(&w, &p, &cfg).unwrap() > 0.1);
    }

    #[test]
    fn rejects_bad_schedule() {
        let cfg = ScoringConfig::new(Regularizer::L2, 1.0, 0.5).unwrap();
        let p = DiscreteDistribution::from_table(&[(&[1], 1.0, 1.0)]).unwrap();
        let bad = AscentConfig {
            lr: 0.0,
            ..AscentConfig::default()
        };
        assert!(gradient_ascent(&p, &cfg, &WeightVector::zeros(1), &bad).is_err());
    }
}
