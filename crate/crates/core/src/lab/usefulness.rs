//! Usefulness of a neuron to its downstream targets, and the gap between
//! the feedback estimate and the downstream utilities.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};
use crate::scoring::{g_scalar, ScoringConfig};

/// `sum_k w_jk 1_j 1_k` over `(w_jk, k spiked)` pairs.
pub fn usefulness(j_spiked: bool, downstream: impl IntoIterator<Item = (f64, bool)>) -> f64 {
    if !j_spiked {
        return 0.0;
    }
    downstream.into_iter().filter(|&(_, k)| k).map(|(w, _)| w).sum()
}

/// Running means over a whole run of `mu_k 1_jk` and `<w_j^ff, x> 1_jk`
/// for every upstream `j` and downstream `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsefulnessEstimator {
    upstream: usize,
    downstream: usize,
    tics: u64,
    cospikes: Vec<u64>,
    utility: Vec<f64>,
    drive: Vec<f64>,
}

impl UsefulnessEstimator {
    pub fn new(upstream: usize, downstream: usize) -> Self {
        let n = upstream * downstream;
        Self {
            upstream,
            downstream,
            tics: 0,
            cospikes: vec![0; n],
            utility: vec![0.0; n],
            drive: vec![0.0; n],
        }
    }

    pub fn tics(&self) -> u64 {
        self.tics
    }

    /// Records one tic. `drive[j]` is the feedforward current of upstream
    /// `j`; `utility[k]` is the neuromodulatory signal of downstream `k`
    /// (0 without an event).
    pub fn observe(&mut self, up: &[bool], down: &[bool], drive: &[f64], utility: &[f64]) -> Result<()> {
        check_len(self.upstream, up.len())?;
        check_len(self.upstream, drive.len())?;
        check_len(self.downstream, down.len())?;
        check_len(self.downstream, utility.len())?;
        self.tics += 1;
        for j in (0..self.upstream).filter(|&j| up[j]) {
            for k in (0..self.downstream).filter(|&k| down[k]) {
                let c = j * self.downstream + k;
                self.cospikes[c] += 1;
                self.utility[c] += utility[k];
                self.drive[c] += drive[j];
            }
        }
        Ok(())
    }

    pub fn cospikes(&self, j: usize, k: usize) -> u64 {
        self.cospikes[j * self.downstream + k]
    }

    /// `E[mu_k 1_jk]` so far.
    pub fn mean_utility(&self, j: usize, k: usize) -> f64 {
        self.mean(&self.utility, j, k)
    }

    /// `E[<w_j^ff, x> 1_jk]` so far.
    pub fn mean_drive(&self, j: usize, k: usize) -> f64 {
        self.mean(&self.drive, j, k)
    }

    fn mean(&self, sums: &[f64], j: usize, k: usize) -> f64 {
        if self.tics == 0 {
            0.0
        } else {
            sums[j * self.downstream + k] / self.tics as f64
        }
    }

    /// `G(E[mu_k 1_jk]) - G(E[<w_j^ff,x> 1_jk])` for one pair; 0 if the pair
    /// never cospiked.
    pub fn pair_gap(&self, j: usize, k: usize, cfg: &ScoringConfig) -> f64 {
        if self.cospikes(j, k) == 0 {
            return 0.0;
        }
        g_scalar(cfg, self.mean_utility(j, k)) - g_scalar(cfg, self.mean_drive(j, k))
    }

    /// `sum_k 1_jk [G(E[mu_k 1_jk]) - G(E[<w_j^ff,x> 1_jk])]` with the
    /// cospikes of the current tic.
    pub fn gap(&self, j: usize, j_spiked: bool, down: &[bool], cfg: &ScoringConfig) -> Result<f64> {
        check_len(self.downstream, down.len())?;
        if !j_spiked {
            return Ok(0.0);
        }
        Ok((0..self.downstream)
            .filter(|&k| down[k])
            .map(|k| self.pair_gap(j, k, cfg))
            .sum())
    }

    /// Mean `|pair_gap|` over pairs that cospiked at least once.
    pub fn mean_abs_gap(&self, cfg: &ScoringConfig) -> f64 {
        let mut total = 0.0;
        let mut n = 0usize;
        for j in 0..self.upstream {
            for k in 0..self.downstream {
                if self.cospikes(j, k) > 0 {
                    total += self.pair_gap(j, k, cfg).abs();
                    n += 1;
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            total / n as f64
        }
    }
}
