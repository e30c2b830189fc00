//! Seeded random instance suites and their line-delimited JSON report.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{Regularizer, ScoringConfig, Utility};
use crate::state::{StateVector, WeightVector};

use super::ascent::{gradient_ascent, AscentConfig};
use super::distribution::{DiscreteDistribution, Outcome};
use super::properness::{check_assumption1_all, check_properness, fixed_point_residual, WeightGrid};

/// Largest state length drawn by the random suites.
pub const SUITE_MAX_DIM: usize = 3;
/// Largest outcome table drawn by the random suites.
pub const SUITE_MAX_OUTCOMES: usize = 8;
/// Fixed-point checks pass at or below this residual.
pub const RESIDUAL_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Selectivity-free scores against the closed-form optimum.
    SelectivityFree,
    /// Selective scores with nonnegative utilities.
    Selective,
    /// Instances built to violate Assumption 1.
    Adversarial,
    /// Gradient ascent from random starts on nonnegative-utility instances.
    FixedPoint,
}

impl std::fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SuiteKind::SelectivityFree => "selectivity_free",
            SuiteKind::Selective => "selective",
            SuiteKind::Adversarial => "adversarial",
            SuiteKind::FixedPoint => "fixed_point",
        })
    }
}

/// One line of the report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabRecord {
    pub suite: String,
    pub seed: u64,
    pub instance: u64,
    pub regularizer: String,
    pub dim: usize,
    pub outcomes: usize,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumption1: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillating: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Generator for instance `instance` of a suite seeded with `seed`.
pub fn instance_rng(seed: u64, instance: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance);
    rng
}

/// Random small instance: state length 1..=3, up to 8 outcomes,
/// `eta ~ U[0.5, 2]`, `theta ~ U[0.1, 0.9]`, utilities on `[mu_lo, 1]`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    regularizer: Regularizer,
    mu_lo: f64,
) -> Result<(DiscreteDistribution, ScoringConfig)> {
    let dim = rng.gen_range(1..=SUITE_MAX_DIM);
    let outcomes = rng.gen_range(1..=SUITE_MAX_OUTCOMES.min(1 << dim));
    let cfg = ScoringConfig::new(regularizer, rng.gen_range(0.5..=2.0), rng.gen_range(0.1..=0.9))?;
    Ok((DiscreteDistribution::random(rng, dim, outcomes, mu_lo, 1.0)?, cfg))
}

/// Instance with a frequent rewarded state `[1,1]` and a costly state
/// `[1,0]` that starts to spike exactly when synapse 0 crosses theta.
/// Returns the distribution, the L2 config and the kink point where only
/// the rewarded state spikes.
pub fn adversarial_instance<R: Rng>(rng: &mut R) -> Result<(DiscreteDistribution, ScoringConfig, WeightVector)> {
    let cfg = ScoringConfig::new(Regularizer::L2, 2.0, 0.5)?;
    let p_good = rng.gen_range(0.6..=0.8);
    let cost = rng.gen_range(5.0..=10.0);
    let p = DiscreteDistribution::new(vec![
        Outcome {
            state: StateVector::from_bits(&[1, 1])?,
            probability: p_good,
            utility: Utility::ONE,
        },
        Outcome {
            state: StateVector::from_bits(&[1, 0])?,
            probability: 1.0 - p_good,
            utility: Utility::new(-cost)?,
        },
    ])?;
    let kink = WeightVector::dense(vec![cfg.theta, cfg.eta * p_good]);
    Ok((p, cfg, kink))
}

fn base_record(kind: SuiteKind, seed: u64, instance: u64, cfg: Option<&ScoringConfig>, p: Option<&DiscreteDistribution>) -> LabRecord {
    LabRecord {
        suite: kind.to_string(),
        seed,
        instance,
        regularizer: cfg.map(|c| c.regularizer.to_string()).unwrap_or_default(),
        dim: p.map_or(0, |p| p.dim()),
        outcomes: p.map_or(0, |p| p.len()),
        ..LabRecord::default()
    }
}

fn failed(mut r: LabRecord, e: Error) -> LabRecord {
    r.verdict = false;
    r.error = Some(e.to_string());
    r
}

fn properness_record(kind: SuiteKind, seed: u64, instance: u64, regularizer: Regularizer) -> LabRecord {
    let selective = kind == SuiteKind::Selective;
    let mu_lo = if selective { 0.0 } else { -1.0 };
    let mut rng = instance_rng(seed, instance);
    let (p, cfg) = match random_instance(&mut rng, regularizer, mu_lo) {
        Ok(x) => x,
        Err(e) => return failed(base_record(kind, seed, instance, None, None), e),
    };
    let mut rec = base_record(kind, seed, instance, Some(&cfg), Some(&p));
    let grid = WeightGrid::covering(&p, &cfg);
    let report = match check_properness(&p, &cfg, &grid, selective) {
        Ok(r) => r,
        Err(e) => return failed(rec, e),
    };
    rec.score_gap = Some(report.score_gap);
    rec.distance = Some(report.distance);
    rec.verdict = report.verdict;
    if selective {
        let w = WeightVector::dense(report.brute_force_optimum.clone());
        match check_assumption1_all(&p, &cfg, &w) {
            Ok(checks) => rec.assumption1 = Some(checks.iter().all(|c| c.holds)),
            Err(e) => return failed(rec, e),
        }
    }
    rec
}

fn adversarial_record(seed: u64, instance: u64, ascent: &AscentConfig) -> Result<LabRecord> {
    let mut rng = instance_rng(seed, instance);
    let (p, cfg, kink) = adversarial_instance(&mut rng)?;
    let mut rec = base_record(SuiteKind::Adversarial, seed, instance, Some(&cfg), Some(&p));
    let holds = check_assumption1_all(&p, &cfg, &kink)?.iter().all(|c| c.holds);
    let start = WeightVector::dense(vec![cfg.theta * rng.gen_range(0.2..0.8), kink.get(1)]);
    let run = gradient_ascent(&p, &cfg, &start, ascent)?;
    rec.residual = Some(fixed_point_residual(&WeightVector::dense(run.weights), &p, &cfg)?);
    rec.assumption1 = Some(holds);
    rec.oscillating = Some(run.oscillating);
    // The suite passes when the violation is detected and ascent misbehaves.
    rec.verdict = !holds && run.oscillating;
    Ok(rec)
}

fn fixed_point_records(
    seed: u64,
    instance: u64,
    regularizer: Regularizer,
    starts: usize,
    ascent: &AscentConfig,
) -> Vec<LabRecord> {
    let mut rng = instance_rng(seed, instance);
    let (p, cfg) = match random_instance(&mut rng, regularizer, 0.0) {
        Ok(x) => x,
        Err(e) => return vec![failed(base_record(SuiteKind::FixedPoint, seed, instance, None, None), e)],
    };
    let grid = WeightGrid::covering(&p, &cfg);
    (0..starts)
        .map(|_| {
            let rec = base_record(SuiteKind::FixedPoint, seed, instance, Some(&cfg), Some(&p));
            let start: Vec<f64> = (0..p.dim()).map(|a| rng.gen_range(grid.lo[a]..=grid.hi[a])).collect();
            let run = gradient_ascent(&p, &cfg, &WeightVector::dense(start), ascent)
                .and_then(|run| Ok((fixed_point_residual(&WeightVector::dense(run.weights.clone()), &p, &cfg)?, run)));
            match run {
                Ok((residual, run)) => LabRecord {
                    residual: Some(residual),
                    oscillating: Some(run.oscillating),
                    verdict: residual <= RESIDUAL_TOLERANCE,
                    ..rec
                },
                Err(e) => failed(rec, e),
            }
        })
        .collect()
}

/// Runs `count` instances of a suite in parallel. `starts` only matters for
/// [`SuiteKind::FixedPoint`], `regularizer` is ignored by
/// [`SuiteKind::Adversarial`].
pub fn run_suite(
    kind: SuiteKind,
    regularizer: Regularizer,
    seed: u64,
    count: usize,
    starts: usize,
    ascent: &AscentConfig,
) -> Vec<LabRecord> {
    (0..count as u64)
        .into_par_iter()
        .flat_map_iter(|i| match kind {
            SuiteKind::SelectivityFree | SuiteKind::Selective => vec![properness_record(kind, seed, i, regularizer)],
            SuiteKind::Adversarial => vec![adversarial_record(seed, i, ascent)
                .unwrap_or_else(|e| failed(base_record(kind, seed, i, None, None), e))],
            SuiteKind::FixedPoint => fixed_point_records(seed, i, regularizer, starts, ascent),
        })
        .collect()
}

/// The default mix: 50 selectivity-free instances per regularizer, 30
/// selective instances per regularizer, 10 adversarial instances and 20
/// starts on 5 fixed-point instances for L2 and LH.
pub fn default_suites(seed: u64) -> Vec<LabRecord> {
    suites_with_count(seed, None)
}

/// The default mix with every suite run on `instances` instances instead.
pub fn suites_with_count(seed: u64, instances: Option<usize>) -> Vec<LabRecord> {
    let ascent = AscentConfig::default();
    let count = |default: usize| instances.unwrap_or(default);
    let mut out = Vec::new();
    for r in Regularizer::ALL {
        out.extend(run_suite(SuiteKind::SelectivityFree, r, seed, count(50), 0, &ascent));
    }
    for r in Regularizer::ALL {
        out.extend(run_suite(SuiteKind::Selective, r, seed, count(30), 0, &ascent));
    }
    out.extend(run_suite(SuiteKind::Adversarial, Regularizer::L2, seed, count(10), 0, &ascent));
    for r in [Regularizer::L2, Regularizer::LH] {
        out.extend(run_suite(SuiteKind::FixedPoint, r, seed, count(5), 20, &ascent));
    }
    out
}

/// Per-suite counts and worst values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub regularizer: String,
    pub count: usize,
    pub passed: usize,
    pub worst_gap: f64,
    pub worst_distance: f64,
    pub worst_residual: f64,
}

impl SuiteSummary {
    pub fn pass_rate(&self) -> f64 {
        if self.count == 0 {
            1.0
        } else {
            self.passed as f64 / self.count as f64
        }
    }
}

/// Groups records by `(suite, regularizer)` in first-seen order.
pub fn summarize(records: &[LabRecord]) -> Vec<SuiteSummary> {
    let mut out: Vec<SuiteSummary> = Vec::new();
    for r in records {
        let pos = out
            .iter()
            .position(|s| s.suite == r.suite && s.regularizer == r.regularizer)
            .unwrap_or_else(|| {
                out.push(SuiteSummary {
                    suite: r.suite.clone(),
                    regularizer: r.regularizer.clone(),
                    ..SuiteSummary::default()
                });
                out.len() - 1
            });
        let s = &mut out[pos];
        s.count += 1;
        s.passed += r.verdict as usize;
        s.worst_gap = s.worst_gap.max(r.score_gap.unwrap_or(0.0));
        s.worst_distance = s.worst_distance.max(r.distance.unwrap_or(0.0));
        s.worst_residual = s.worst_residual.max(r.residual.unwrap_or(0.0));
    }
    out
}

pub fn write_jsonl<W: Write>(records: &[LabRecord], mut out: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parses a report; blank lines are skipped.
pub fn parse_jsonl(text: &str) -> Result<Vec<LabRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1))))
        .collect()
}
