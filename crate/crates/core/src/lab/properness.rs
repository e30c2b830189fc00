//! Expected scores, the property maps, and a brute-force argmax oracle.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scoring::{
    activate, g_map, penalty_gradient, project, regularizer_cost, Regularizer, ScoringConfig,
};
use crate::state::{StateVector, WeightVector};

use super::distribution::DiscreteDistribution;

/// Largest weight dimension the oracle accepts.
pub const MAX_GRID_DIM: usize = 4;
/// Largest outcome table the oracle accepts.
pub const MAX_OUTCOMES: usize = 16;
/// Grid points per axis on the first pass.
pub const COARSE_STEPS: usize = 21;
/// Refinement stops once every axis step is at most this.
pub const RESOLUTION: f64 = 1e-3;
/// A predicted optimum passes when the oracle beats it by at most this.
pub const PROPERNESS_TOLERANCE: f64 = 1e-6;
/// Step sizes tried when looking for an Assumption 1 witness.
pub const EPSILON_GRID: [f64; 6] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1];

/// `E_P[S(x; w)]` if `selective`, else `E_P[T(x; w)]` where `T` drops the
/// spike gate from the reward.
pub fn expected_score(
    p: &DiscreteDistribution,
    w: &WeightVector,
    cfg: &ScoringConfig,
    selective: bool,
) -> Result<f64> {
    check_len(p.dim(), w.len())?;
    let mut reward = 0.0;
    for o in p.outcomes() {
        let m = w.dot(&o.state)? - cfg.theta;
        if !selective || m > 0.0 {
            reward += o.probability * o.utility.get() * m;
        }
    }
    Ok(reward - regularizer_cost(cfg, w)?)
}

/// Optimum of the selectivity-free score: `G(E_P[mu x])`.
pub fn gamma_t(p: &DiscreteDistribution, cfg: &ScoringConfig) -> Vec<f64> {
    g_map(cfg, &p.expected_utility_input())
}

/// Spike set of `w_star` and `G(E_P[mu x 1_{w*}])`.
pub fn gamma_s(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    w_star: &WeightVector,
) -> Result<(Vec<StateVector>, Vec<f64>)> {
    check_len(p.dim(), w_star.len())?;
    let mut spikes = Vec::new();
    for o in p.outcomes() {
        if activate(w_star, &o.state, cfg.theta)? {
            spikes.push(o.state.clone());
        }
    }
    let v = p.gated_expected_utility_input(w_star, cfg.theta)?;
    Ok((spikes, g_map(cfg, &v)))
}

/// Axis-aligned box with `steps` points per axis, ends included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub steps: usize,
}

impl WeightGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, steps: usize) -> Result<Self> {
        check_len(lo.len(), hi.len())?;
        if steps < 2 {
            return Err(Error::Config(format!("grid needs at least 2 steps per axis, got {steps}")));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
            return Err(Error::Config("grid bounds must be finite with lo <= hi".into()));
        }
        Ok(Self { lo, hi, steps })
    }

    /// Coarse grid over a box that contains every optimum of `p` under
    /// `cfg`: `|w_i| <= eta max|mu|` for L2, `(0, exp(eta max|mu| - 1)]` for
    /// LH and `[0,1]` for L1.
    pub fn covering(p: &DiscreteDistribution, cfg: &ScoringConfig) -> Self {
        let m = p.max_abs_utility();
        let (lo, hi) = match cfg.regularizer {
            Regularizer::L2 => {
                let b = (cfg.eta * m).max(RESOLUTION);
                (-b, b)
            }
            Regularizer::LH => (0.0, (cfg.eta * m - 1.0).exp()),
            Regularizer::L1 => (0.0, 1.0),
        };
        Self {
            lo: vec![lo; p.dim()],
            hi: vec![hi; p.dim()],
            steps: COARSE_STEPS,
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.steps - 1) as f64
    }

    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(0.0, f64::max)
    }

    fn value(&self, axis: usize, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.hi[axis]
        } else {
            self.lo[axis] + k as f64 * self.step(axis)
        }
    }

    /// Visits every grid point in lexicographic order.
    fn for_each(&self, mut f: impl FnMut(&[f64])) {
        let d = self.dim();
        let mut idx = vec![0usize; d];
        let mut point: Vec<f64> = (0..d).map(|a| self.value(a, 0)).collect();
        loop {
            f(&point);
            let mut axis = d;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < self.steps {
                    point[axis] = self.value(axis, idx[axis]);
                    break;
                }
                idx[axis] = 0;
                point[axis] = self.value(axis, 0);
            }
        }
    }
}

fn guard(p: &DiscreteDistribution, grid: &WeightGrid) -> Result<()> {
    if grid.dim() > MAX_GRID_DIM {
        return Err(Error::Intractable(format!(
            "grid dimension {} exceeds {MAX_GRID_DIM}",
            grid.dim()
        )));
    }
    if p.len() > MAX_OUTCOMES {
        return Err(Error::Intractable(format!("{} outcomes exceed {MAX_OUTCOMES}", p.len())));
    }
    check_len(p.dim(), grid.dim())
}

fn argmax_on(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    grid: &WeightGrid,
    selective: bool,
    mut best: Option<(Vec<f64>, f64)>,
) -> Result<(Vec<f64>, f64)> {
    let mut err = None;
    grid.for_each(|point| {
        if err.is_some() {
            return;
        }
        let w = WeightVector::dense(point.to_vec());
        match expected_score(p, &w, cfg, selective) {
            Ok(s) => {
                let better = match &best {
                    None => true,
                    Some((bw, bs)) => s > *bs || (s == *bs && point < bw.as_slice()),
                };
                if better {
                    best = Some((point.to_vec(), s));
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    best.ok_or_else(|| Error::Config("empty grid".into()))
}

/// Exhaustive grid argmax of the expected score, refined around the
/// incumbent by a factor of 3 per pass until every axis step is at most
/// [`RESOLUTION`]. Ties go to the lexicographically smallest point.
pub fn brute_force_argmax(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    grid: &WeightGrid,
    selective: bool,
) -> Result<Vec<f64>> {
    guard(p, grid)?;
    let (mut best, mut score) = argmax_on(p, cfg, grid, selective, None)?;
    let mut current = grid.clone();
    while current.max_step() > RESOLUTION {
        let mut lo = Vec::with_capacity(current.dim());
        let mut hi = Vec::with_capacity(current.dim());
        for a in 0..current.dim() {
            let s = current.step(a);
            lo.push((best[a] - s).max(grid.lo[a]));
            hi.push((best[a] + s).min(grid.hi[a]));
        }
        current = WeightGrid::new(lo, hi, 7)?;
        (best, score) = argmax_on(p, cfg, &current, selective, Some((best, score)))?;
    }
    Ok(best)
}

/// Outcome of comparing a predicted optimum with the oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropernessReport {
    pub predicted_optimum: Vec<f64>,
    pub brute_force_optimum: Vec<f64>,
    /// How much the oracle beats the prediction, floored at 0.
    pub score_gap: f64,
    /// Largest coordinate difference between the two optima.
    pub distance: f64,
    pub verdict: bool,
}

/// Compares `Gamma^T(P)` (or the G-component of `Gamma(P)` when
/// `selective`, built from the oracle's spike set) with the oracle.
pub fn check_properness(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    grid: &WeightGrid,
    selective: bool,
) -> Result<PropernessReport> {
    let bf = brute_force_argmax(p, cfg, grid, selective)?;
    let bf_w = WeightVector::dense(bf.clone());
    let predicted = if selective {
        gamma_s(p, cfg, &bf_w)?.1
    } else {
        gamma_t(p, cfg)
    };
    let pred_w = WeightVector::dense(predicted.clone());
    let gap = (expected_score(p, &bf_w, cfg, selective)? - expected_score(p, &pred_w, cfg, selective)?).max(0.0);
    let distance = predicted
        .iter()
        .zip(&bf)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PropernessReport {
        predicted_optimum: predicted,
        brute_force_optimum: bf,
        score_gap: gap,
        distance,
        verdict: gap <= PROPERNESS_TOLERANCE,
    })
}

/// `max_i |w_i - G(E_P[mu x 1_w])_i|` over active synapses.
pub fn fixed_point_residual(w: &WeightVector, p: &DiscreteDistribution, cfg: &ScoringConfig) -> Result<f64> {
    let target = g_map(cfg, &p.gated_expected_utility_input(w, cfg.theta)?);
    Ok(w.active().map(|i| (w.get(i) - target[i]).abs()).fold(0.0, f64::max))
}

/// `E_P[mu x_i 1_w] - dA/dw_i`: the expected ascent direction of synapse `i`.
pub fn expected_gradient(w: &WeightVector, p: &DiscreteDistribution, cfg: &ScoringConfig) -> Result<Vec<f64>> {
    let v = p.gated_expected_utility_input(w, cfg.theta)?;
    Ok((0..w.len())
        .map(|i| if w.is_active(i) { v[i] - penalty_gradient(cfg, w.get(i)) } else { 0.0 })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assumption1Report {
    pub synapse: usize,
    pub delta: f64,
    /// Smallest step on the grid along which the expected score rises.
    pub witness: Option<f64>,
    pub holds: bool,
}

/// Looks for `eps` on `epsilon_grid` such that moving synapse `i` by
/// `eps * delta` strictly raises the expected score. Holds vacuously when
/// `delta = 0` or the domain blocks the move.
pub fn check_assumption1(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    w: &WeightVector,
    i: usize,
    epsilon_grid: &[f64],
) -> Result<Assumption1Report> {
    if i >= w.len() {
        return Err(Error::Dimension {
            expected: w.len(),
            got: i + 1,
        });
    }
    let delta = expected_gradient(w, p, cfg)?[i];
    let vacuous = Assumption1Report {
        synapse: i,
        delta,
        witness: None,
        holds: true,
    };
    if delta == 0.0 || !w.is_active(i) {
        return Ok(vacuous);
    }
    let base = expected_score(p, w, cfg, true)?;
    let mut grid: Vec<f64> = epsilon_grid.iter().copied().filter(|e| *e > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    let mut moved = false;
    for eps in grid {
        let mut next = w.clone();
        let target = project(cfg, w.get(i) + eps * delta);
        if target == w.get(i) {
            continue;
        }
        moved = true;
        next.set(i, target);
        if expected_score(p, &next, cfg, true)? > base {
            return Ok(Assumption1Report {
                witness: Some(eps),
                ..vacuous
            });
        }
    }
    Ok(Assumption1Report {
        holds: !moved,
        ..vacuous
    })
}

/// [`check_assumption1`] for every synapse with [`EPSILON_GRID`].
pub fn check_assumption1_all(
    p: &DiscreteDistribution,
    cfg: &ScoringConfig,
    w: &WeightVector,
) -> Result<Vec<Assumption1Report>> {
    (0..w.len())
        .map(|i| check_assumption1(p, cfg, w, i, &EPSILON_GRID))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::Utility;

    fn cfg(r: Regularizer, eta: f64, theta: f64) -> ScoringConfig {
        ScoringConfig::new(r, eta, theta).unwrap()
    }

    fn sv(bits: &[u8]) -> StateVector {
        StateVector::from_bits(bits).unwrap()
    }

    #[test]
    fn expected_score_examples() {
        let c = cfg(Regularizer::L2, 1.0, 0.5);
        let p = DiscreteDistribution::from_table(&[(&[1, 0], 0.5, 1.0), (&[0, 1], 0.5, 1.0)]).unwrap();
        let w = WeightVector::dense(vec![1.0, 1.0]);
        assert!((expected_score(&p, &w, &c, true).unwrap() + 0.5).abs() < 1e-15);

        let point = DiscreteDistribution::point_mass(sv(&[1, 1]), Utility::new(2.0).unwrap());
        let s = crate::scoring::score(&sv(&[1, 1]), &w, Utility::new(2.0).unwrap(), &c).unwrap();
        assert_eq!(expected_score(&point, &w, &c, true).unwrap(), s);

        let l1 = cfg(Regularizer::L1, 1.0, 0.5);
        assert_eq!(expected_score(&p, &WeightVector::zeros(2), &l1, true).unwrap(), 0.0);
    }

    #[test]
    fn gamma_t_examples() {
        let zero = DiscreteDistribution::from_table(&[(&[1, 0], 0.5, 0.0), (&[0, 1], 0.5, 0.0)]).unwrap();
        assert_eq!(gamma_t(&zero, &cfg(Regularizer::L2, 1.0, 0.5)), vec![0.0, 0.0]);
        let lh = gamma_t(&zero, &cfg(Regularizer::LH, 1.0, 0.5));
        assert!(lh.iter().all(|v| (v - (-1.0f64).exp()).abs() < 1e-15));
        assert_eq!(gamma_t(&zero, &cfg(Regularizer::L1, 1.0, 0.5)), vec![0.0, 0.0]);
        let point = DiscreteDistribution::point_mass(sv(&[1, 0]), Utility::ONE);
        assert_eq!(gamma_t(&point, &cfg(Regularizer::L2, 1.0, 0.5)), vec![1.0, 0.0]);
    }

    #[test]
    fn gamma_s_examples() {
        let c = cfg(Regularizer::L2, 1.0, 0.5);
        let p = DiscreteDistribution::from_table(&[(&[1, 0], 0.5, 1.0), (&[1, 1], 0.5, 1.0)]).unwrap();
        let (set, g) = gamma_s(&p, &c, &WeightVector::zeros(2)).unwrap();
        assert!(set.is_empty());
        assert_eq!(g, vec![0.0, 0.0]);

        let point = DiscreteDistribution::point_mass(sv(&[1, 1]), Utility::ONE);
        let w = WeightVector::dense(vec![1.0, 1.0]);
        let (set, g) = gamma_s(&point, &c, &w).unwrap();
        assert_eq!(set, vec![sv(&[1, 1])]);
        assert_eq!(g, gamma_t(&point, &c));
    }

    #[test]
    fn grid_enumerates_lexicographically() {
        let g = WeightGrid::new(vec![0.0, 0.0], vec![1.0, 2.0], 3).unwrap();
        let mut seen = vec![];
        g.for_each(|p| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![0.0, 0.0]);
        assert_eq!(seen[1], vec![0.0, 1.0]);
        assert_eq!(seen[8], vec![1.0, 2.0]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert!(WeightGrid::new(vec![0.0], vec![1.0], 1).is_err());
        assert!(WeightGrid::new(vec![1.0], vec![0.0], 3).is_err());
    }

    #[test]
    fn oracle_guard() {
        let p = DiscreteDistribution::point_mass(StateVector::zeros(5), Utility::ONE);
        let c = cfg(Regularizer::L2, 1.0, 0.5);
        let grid = WeightGrid::covering(&p, &c);
        assert!(matches!(
            brute_force_argmax(&p, &c, &grid, false),
            Err(Error::Intractable(_))
        ));
    }

    #[test]
    fn oracle_on_zero_utility_is_silent() {
        let p = DiscreteDistribution::from_table(&[(&[1, 0], 0.3, 0.0), (&[1, 1], 0.7, 0.0)]).unwrap();
        for r in [Regularizer::L2, Regularizer::L1] {
            let c = cfg(r, 1.0, 0.5);
            let grid = WeightGrid::covering(&p, &c);
            let w = brute_force_argmax(&p, &c, &grid, true).unwrap();
            assert!(w.iter().all(|v| v.abs() <= RESOLUTION), "{r}: {w:?}");
        }
    }

    #[test]
    fn oracle_matches_gamma_t_on_point_mass() {
        let p = DiscreteDistribution::point_mass(sv(&[1, 0]), Utility::ONE);
        let c = cfg(Regularizer::L2, 1.0, 0.5);
        let report = check_properness(&p, &c, &WeightGrid::covering(&p, &c), false).unwrap();
        assert!(report.verdict);
        assert!(report.distance <= RESOLUTION);
    }

    #[test]
    fn residual_examples() {
        let c = cfg(Regularizer::L2, 1.0, 0.5);
        let p = DiscreteDistribution::from_table(&[(&[1, 0], 0.5, 1.0), (&[1, 1], 0.5, 0.5)]).unwrap();
        assert_eq!(fixed_point_residual(&WeightVector::zeros(2), &p, &c).unwrap(), 0.0);
        // Both states spike at the fixed point w = eta E[mu x] = [0.75, 0.25].
        let w = WeightVector::dense(vec![0.75, 0.25]);
        assert!(fixed_point_residual(&w, &p, &c).unwrap() < 1e-15);
        let moved = WeightVector::dense(vec![0.85, 0.25]);
        assert!(fixed_point_residual(&moved, &p, &c).unwrap() > 0.05);
    }

    #[test]
    fn assumption1_examples() {
        let c = cfg(Regularizer::L2, 1.0, 0.5);
        let p = DiscreteDistribution::from_table(&[(&[1, 0], 0.5, 1.0), (&[1, 1], 0.5, 0.5)]).unwrap();
        let w = WeightVector::dense(vec![0.6, 0.0]);
        for r in check_assumption1_all(&p, &c, &w).unwrap() {
            assert!(r.holds, "{r:?}");
        }
        let w = WeightVector::dense(vec![0.75, 0.25]);
        let r = check_assumption1(&p, &c, &w, 0, &EPSILON_GRID).unwrap();
        assert_eq!(r.delta, 0.0);
        assert!(r.holds && r.witness.is_none());

        // A hidden, very costly state sits just above the kink.
        let p = DiscreteDistribution::from_table(&[(&[1, 1], 0.5, 1.0), (&[1, 0], 0.5, -10.0)]).unwrap();
        let c = cfg(Regularizer::L2, 2.0, 0.5);
        let w = WeightVector::dense(vec![0.5, 1.0]);
        let r = check_assumption1(&p, &c, &w, 0, &EPSILON_GRID).unwrap();
        assert!(r.delta > 0.0);
        assert!(!r.holds);
    }
}
