//! Utility functions `mu(x)`: frequency, invariance, neuromodulator, feedback.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scoring::{activate, Utility};
use crate::state::{StateVector, WeightVector};

/// Which utility a neuron is paid with.
#[derive(Clone, Debug)]
pub enum UtilitySpec {
    Frequency,
    Invariance(InvarianceUtility),
    Neuromodulator(NeuromodulatorModel),
    Feedback(FeedbackUtility),
}

/// Constant utility 1: spike for frequent inputs.
pub fn u_frequency(_x: &StateVector) -> Utility {
    Utility::ONE
}

/// Reward for having spiked on the previous tic(s).
///
/// With `horizon = 1` this is exactly `activate(w, x_prev, theta)`. Longer
/// horizons add `gamma^k * activate(w, x_{t-1-k})`, undiscounted leading term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceUtility {
    pub gamma: f64,
    pub horizon: usize,
}

impl Default for InvarianceUtility {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            horizon: 1,
        }
    }
}

impl InvarianceUtility {
    pub fn new(gamma: f64, horizon: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Config(format!("discount must lie in [0,1], got {gamma}")));
        }
        if horizon == 0 {
            return Err(Error::Config("invariance horizon must be at least 1".into()));
        }
        Ok(Self { gamma, horizon })
    }

    /// `history[0]` is the state at `t-1`, `history[1]` at `t-2`, and so on.
    pub fn evaluate(&self, history: &[StateVector], w: &WeightVector, theta: f64) -> Result<Utility> {
        let mut total = 0.0;
        let mut discount = 1.0;
        for x in history.iter().take(self.horizon) {
            if activate(w, x, theta)? {
                total += discount;
            }
            discount *= self.gamma;
        }
        Utility::new(total)
    }
}

/// Horizon-1 invariance utility: 1 iff the neuron spiked on `x_prev`.
pub fn u_invariance(
    x_prev: &StateVector,
    x_now: &StateVector,
    w: &WeightVector,
    theta: f64,
) -> Result<Utility> {
    check_len(x_prev.len(), x_now.len())?;
    InvarianceUtility::default().evaluate(std::slice::from_ref(x_prev), w, theta)
}

/// Conditional law of a neuromodulator given the system state.
#[derive(Clone, Debug, Default)]
pub struct NeuromodulatorModel {
    conditional: BTreeMap<StateVector, Vec<(f64, f64)>>,
}

impl NeuromodulatorModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `P(nu | x)` as `(value, probability)` pairs.
    pub fn insert(&mut self, x: StateVector, outcomes: Vec<(f64, f64)>) -> Result<()> {
        let mass: f64 = outcomes.iter().map(|&(_, p)| p).sum();
        let valid = outcomes
            .iter()
            .all(|&(v, p)| v.is_finite() && p.is_finite() && p >= 0.0);
        if !valid || (mass - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "neuromodulator law for {:?} is not a finite probability table",
                x.bits()
            )));
        }
        self.conditional.insert(x, outcomes);
        Ok(())
    }

    /// Deterministic modulator `nu = value` at `x`.
    pub fn insert_constant(&mut self, x: StateVector, value: f64) -> Result<()> {
        self.insert(x, vec![(value, 1.0)])
    }

    pub fn expectation(&self, x: &StateVector) -> Result<Utility> {
        let law = self.conditional.get(x).ok_or_else(|| {
            Error::Config(format!("neuromodulator undefined on state {:?}", x.bits()))
        })?;
        Utility::new(law.iter().map(|&(v, p)| v * p).sum())
    }
}

/// `E[nu | x]`.
pub fn u_neuromodulator(model: &NeuromodulatorModel, x: &StateVector) -> Result<Utility> {
    model.expectation(x)
}

/// Task reward of a motor area: +1 when its action was correct, -1 otherwise.
pub fn task_reward(correct: bool) -> Utility {
    if correct {
        Utility::ONE
    } else {
        Utility::MINUS_ONE
    }
}

/// Feedback current from the downstream population, used as utility.
#[derive(Clone, Debug)]
pub struct FeedbackUtility {
    w_fb: WeightVector,
}

impl FeedbackUtility {
    /// Fails when the feedback mask shares a synapse with the feedforward mask.
    pub fn new(w_fb: WeightVector, w_ff: &WeightVector) -> Result<Self> {
        check_len(w_ff.len(), w_fb.len())?;
        if !w_fb.disjoint_from(w_ff) {
            return Err(Error::Config(
                "feedback and feedforward populations must be disjoint".into(),
            ));
        }
        Ok(Self { w_fb })
    }

    pub fn weights(&self) -> &WeightVector {
        &self.w_fb
    }

    pub fn evaluate(&self, x: &StateVector) -> Result<Utility> {
        u_feedback(&self.w_fb, x)
    }
}

/// `<w_fb, x>`.
pub fn u_feedback(w_fb: &WeightVector, x: &StateVector) -> Result<Utility> {
    Utility::new(w_fb.dot(x)?)
}

impl UtilitySpec {
    /// Evaluates the utility on `x`; `history` holds earlier states, most recent first.
    pub fn evaluate(
        &self,
        x: &StateVector,
        history: &[StateVector],
        w: &WeightVector,
        theta: f64,
    ) -> Result<Utility> {
        match self {
            UtilitySpec::Frequency => Ok(u_frequency(x)),
            UtilitySpec::Invariance(inv) => inv.evaluate(history, w, theta),
            UtilitySpec::Neuromodulator(model) => model.expectation(x),
            UtilitySpec::Feedback(fb) => fb.evaluate(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(bits: &[u8]) -> StateVector {
        StateVector::from_bits(bits).unwrap()
    }

    #[test]
    fn frequency_is_constant() {
        assert_eq!(u_frequency(&sv(&[0, 0, 0])), Utility::ONE);
        assert_eq!(u_frequency(&sv(&[1, 1, 1])), Utility::ONE);
    }

    #[test]
    fn invariance_examples() {
        let w = WeightVector::dense(vec![1.0, 0.0]);
        let now = sv(&[0, 0]);
        assert_eq!(u_invariance(&sv(&[0, 1]), &now, &w, 0.5).unwrap().get(), 0.0);
        assert_eq!(u_invariance(&sv(&[1, 0]), &now, &w, 0.5).unwrap().get(), 1.0);
        let two = InvarianceUtility::new(0.5, 2).unwrap();
        let hist = [sv(&[1, 0]), sv(&[1, 1])];
        assert_eq!(two.evaluate(&hist, &w, 0.5).unwrap().get(), 1.5);
        assert!(InvarianceUtility::new(1.5, 1).is_err());
    }

    #[test]
    fn neuromodulator_examples() {
        let x = sv(&[1, 0]);
        let mut m = NeuromodulatorModel::new();
        m.insert_constant(x.clone(), 1.0).unwrap();
        assert_eq!(u_neuromodulator(&m, &x).unwrap().get(), 1.0);
        m.insert(x.clone(), vec![(1.0, 0.5), (-1.0, 0.5)]).unwrap();
        assert_eq!(u_neuromodulator(&m, &x).unwrap().get(), 0.0);
        assert!(matches!(u_neuromodulator(&m, &sv(&[0, 1])), Err(Error::Config(_))));
        assert!(m.insert(x, vec![(1.0, 0.7)]).is_err());
        assert_eq!(task_reward(true).get(), 1.0);
        assert_eq!(task_reward(false).get(), -1.0);
    }

    #[test]
    fn neuromodulator_matches_summation_oracle() {
        let mut m = NeuromodulatorModel::new();
        for (k, x) in StateVector::enumerate(3).enumerate() {
            let p = (k as f64 + 1.0) / 10.0;
            m.insert(x, vec![(2.0, p), (-3.0, 1.0 - p)]).unwrap();
        }
        for (k, x) in StateVector::enumerate(3).enumerate() {
            let p = (k as f64 + 1.0) / 10.0;
            let oracle = 2.0 * p - 3.0 * (1.0 - p);
            assert!((m.expectation(&x).unwrap().get() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn feedback_examples() {
        let ff = WeightVector::masked(vec![0.3, 0.3, 0.0, 0.0], vec![true, true, false, false]).unwrap();
        let fb = WeightVector::masked(vec![0.0, 0.0, 0.5, 0.5], vec![false, false, true, true]).unwrap();
        let u = FeedbackUtility::new(fb.clone(), &ff).unwrap();
        assert_eq!(u.evaluate(&sv(&[1, 1, 1, 1])).unwrap().get(), 1.0);
        let zero = WeightVector::masked(vec![0.0; 4], vec![false, false, true, true]).unwrap();
        assert_eq!(u_feedback(&zero, &sv(&[1, 1, 1, 1])).unwrap().get(), 0.0);
        let overlapping = WeightVector::dense(vec![0.1; 4]);
        assert!(FeedbackUtility::new(overlapping, &ff).is_err());
    }

    proptest! {
        #[test]
        fn feedback_is_linear_on_disjoint_supports(
            w in prop::collection::vec(0.0f64..1.0, 6),
            split in prop::collection::vec(0u8..3, 6),
        ) {
            let fb = WeightVector::dense(w);
            let a: Vec<u8> = split.iter().map(|&s| (s == 1) as u8).collect();
            let b: Vec<u8> = split.iter().map(|&s| (s == 2) as u8).collect();
            let both: Vec<u8> = split.iter().map(|&s| (s > 0) as u8).collect();
            let lhs = u_feedback(&fb, &sv(&both)).unwrap().get();
            let rhs = u_feedback(&fb, &sv(&a)).unwrap().get() + u_feedback(&fb, &sv(&b)).unwrap().get();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
