//! Explicit joint distributions over spike patterns and utilities.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scoring::{activate, Utility};
use crate::state::{StateVector, WeightVector};

/// Probabilities must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub state: StateVector,
    pub probability: f64,
    pub utility: Utility,
}

/// Finite table of `(x, P(x), mu(x))` with distinct states of equal length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    outcomes: Vec<Outcome>,
}

impl DiscreteDistribution {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let Some(first) = outcomes.first() else {
            return Err(Error::Config("distribution has no outcomes".into()));
        };
        let dim = first.state.len();
        let mut seen = BTreeSet::new();
        let mut total = 0.0;
        for o in &outcomes {
            check_len(dim, o.state.len())?;
            if !(o.probability.is_finite() && o.probability >= 0.0) {
                return Err(Error::Config(format!("probability {} is not in [0,1]", o.probability)));
            }
            if !seen.insert(o.state.clone()) {
                return Err(Error::Config(format!("duplicate outcome {:?}", o.state.bits())));
            }
            total += o.probability;
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Config(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { outcomes })
    }

    /// Builds from `(bits, probability, utility)` triples.
    pub fn from_table(rows: &[(&[u8], f64, f64)]) -> Result<Self> {
        let outcomes = rows
            .iter()
            .map(|&(bits, probability, mu)| {
                Ok(Outcome {
                    state: StateVector::from_bits(bits)?,
                    probability,
                    utility: Utility::new(mu)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    pub fn point_mass(state: StateVector, utility: Utility) -> Self {
        Self {
            outcomes: vec![Outcome {
                state,
                probability: 1.0,
                utility,
            }],
        }
    }

    /// Random instance: `outcomes` distinct states of length `dim`,
    /// Dirichlet(1,..,1) probabilities, utilities uniform on `[lo, hi]`.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, outcomes: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 || dim >= 63 || outcomes == 0 || (outcomes as u64) > (1u64 << dim) {
            return Err(Error::Config(format!("cannot draw {outcomes} distinct states of length {dim}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("bad utility range [{lo}, {hi}]")));
        }
        let mut codes: Vec<u64> = if dim <= 16 {
            let mut all: Vec<u64> = (0..1u64 << dim).collect();
            all.shuffle(rng);
            all.truncate(outcomes);
            all
        } else {
            let mut set = BTreeSet::new();
            while set.len() < outcomes {
                set.insert(rng.gen_range(0..1u64 << dim));
            }
            set.into_iter().collect()
        };
        codes.sort_unstable();
        let gammas: Vec<f64> = (0..outcomes).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = gammas.iter().sum();
        let mut rows = Vec::with_capacity(outcomes);
        for (code, g) in codes.into_iter().zip(gammas) {
            let bits: Vec<bool> = (0..dim).map(|i| (code >> i) & 1 == 1).collect();
            let mu = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            rows.push(Outcome {
                state: StateVector::from_bools(&bits),
                probability: g / total,
                utility: Utility::new(mu)?,
            });
        }
        // Renormalize the last entry so the sum is one to rounding.
        let head: f64 = rows[..rows.len() - 1].iter().map(|o| o.probability).sum();
        if let Some(last) = rows.last_mut() {
            last.probability = (1.0 - head).max(0.0);
        }
        Self::new(rows)
    }

    /// `lambda * a + (1 - lambda) * b` over the union of outcomes. Shared
    /// states must carry the same utility.
    pub fn mix(a: &Self, b: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Config(format!("mixing weight {lambda} not in [0,1]")));
        }
        check_len(a.dim(), b.dim())?;
        let mut out: Vec<Outcome> = a
            .outcomes
            .iter()
            .map(|o| Outcome {
                probability: lambda * o.probability,
                ..o.clone()
            })
            .collect();
        for o in &b.outcomes {
            let p = (1.0 - lambda) * o.probability;
            match out.iter_mut().find(|q| q.state == o.state) {
                Some(q) if q.utility == o.utility => q.probability += p,
                Some(_) => {
                    return Err(Error::Config(format!(
                        "state {:?} has different utilities in the two distributions",
                        o.state.bits()
                    )))
                }
                None => out.push(Outcome {
                    probability: p,
                    ..o.clone()
                }),
            }
        }
        let total: f64 = out.iter().map(|o| o.probability).sum();
        for o in &mut out {
            o.probability /= total;
        }
        Self::new(out)
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Length of every state.
    pub fn dim(&self) -> usize {
        self.outcomes[0].state.len()
    }

    /// `E_P[mu(x) x]`.
    pub fn expected_utility_input(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for o in &self.outcomes {
            let pm = o.probability * o.utility.get();
            for i in o.state.active() {
                v[i] += pm;
            }
        }
        v
    }

    /// `E_P[mu(x) x 1_w(x)]`: the expectation restricted to states where
    /// `w` spikes.
    pub fn gated_expected_utility_input(&self, w: &WeightVector, theta: f64) -> Result<Vec<f64>> {
        check_len(self.dim(), w.len())?;
        let mut v = vec![0.0; self.dim()];
        for o in &self.outcomes {
            if activate(w, &o.state, theta)? {
                let pm = o.probability * o.utility.get();
                for i in o.state.active() {
                    v[i] += pm;
                }
            }
        }
        Ok(v)
    }

    /// Largest absolute utility in the table.
    pub fn max_abs_utility(&self) -> f64 {
        self.outcomes.iter().map(|o| o.utility.get().abs()).fold(0.0, f64::max)
    }
}
