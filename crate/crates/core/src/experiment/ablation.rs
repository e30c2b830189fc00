//! Paired runs with one mechanism switched off.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::aggregate::Aggregate;
use super::config::ExperimentConfig;
use super::run::run_experiment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationAxis {
    /// S reaches D without delay.
    Delay,
    /// Hidden layers stop learning, so only M is plastic.
    Feedback,
    /// Hidden-layer learning uses spike indicators instead of traces.
    Trace,
}

impl AblationAxis {
    pub const ALL: [AblationAxis; 3] = [AblationAxis::Delay, AblationAxis::Feedback, AblationAxis::Trace];

    /// `cfg` with this mechanism switched off.
    pub fn apply(self, cfg: &ExperimentConfig) -> ExperimentConfig {
        let mut out = cfg.clone();
        match self {
            AblationAxis::Delay => out.topology.delay = 0,
            AblationAxis::Feedback => out.topology.hidden_plastic = false,
            AblationAxis::Trace => out.dynamics.trace_learning = false,
        }
        out
    }
}

impl fmt::Display for AblationAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AblationAxis::Delay => "delay",
            AblationAxis::Feedback => "feedback",
            AblationAxis::Trace => "trace",
        })
    }
}

impl FromStr for AblationAxis {
    type Err = Error;

    /// Accepts `delay`, `delay=0`, `feedback`, `feedback=off`,
    /// `feedback_plastic=false`, `trace` and `trace=off`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "delay" | "delay=0" => Ok(AblationAxis::Delay),
            "feedback" | "feedback=off" | "feedback_plastic=false" => Ok(AblationAxis::Feedback),
            "trace" | "trace=off" | "trace_learning=false" => Ok(AblationAxis::Trace),
            other => Err(Error::Parse(format!(
                "unknown ablation axis `{other}` (expected delay, feedback or trace)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub seed: u64,
    pub baseline_percent_correct: f64,
    pub ablated_percent_correct: f64,
    pub baseline_correct_per_1000_tics: f64,
    pub ablated_correct_per_1000_tics: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub axis: AblationAxis,
    pub rows: Vec<AblationRow>,
    pub baseline: Aggregate,
    pub ablated: Aggregate,
}

impl AblationReport {
    /// Ablated minus baseline median percent correct.
    pub fn delta_percent_correct(&self) -> f64 {
        self.ablated.percent_correct.median - self.baseline.percent_correct.median
    }

    /// Ablated minus baseline median correct engagements per 1000 tics.
    pub fn delta_correct_per_1000_tics(&self) -> f64 {
        self.ablated.correct_per_1000_tics.median - self.baseline.correct_per_1000_tics.median
    }

    /// Tab-separated per-seed table followed by the median row.
    pub fn table(&self) -> String {
        let mut out = format!("seed\tbase_pc\t{0}_pc\tbase_per_1000\t{0}_per_1000\n", self.axis);
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\n",
                r.seed,
                r.baseline_percent_correct,
                r.ablated_percent_correct,
                r.baseline_correct_per_1000_tics,
                r.ablated_correct_per_1000_tics
            ));
        }
        out.push_str(&format!(
            "median\t{:.2}\t{:.2}\t{:.2}\t{:.2}\n",
            self.baseline.percent_correct.median,
            self.ablated.percent_correct.median,
            self.baseline.correct_per_1000_tics.median,
            self.ablated.correct_per_1000_tics.median
        ));
        out
    }
}

/// Runs `cfg` and its ablation on the same seeds.
pub fn run_ablation(cfg: &ExperimentConfig, axis: AblationAxis) -> Result<AblationReport> {
    let base = run_experiment(cfg)?;
    let ablated = run_experiment(&axis.apply(cfg))?;
    let rows = base
        .iter()
        .zip(&ablated)
        .map(|(b, a)| AblationRow {
            seed: b.seed,
            baseline_percent_correct: b.metrics.percent_correct,
            ablated_percent_correct: a.metrics.percent_correct,
            baseline_correct_per_1000_tics: b.metrics.correct_per_1000_tics,
            ablated_correct_per_1000_tics: a.metrics.correct_per_1000_tics,
        })
        .collect();
    Ok(AblationReport {
        axis,
        rows,
        baseline: Aggregate::of(base.iter().map(|r| &r.metrics)),
        ablated: Aggregate::of(ablated.iter().map(|r| &r.metrics)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parse_and_apply() {
        let cfg = ExperimentConfig::default();
        for axis in AblationAxis::ALL {
            assert_eq!(axis.to_string().parse::<AblationAxis>().unwrap(), axis);
        }
        assert_eq!("delay=0".parse::<AblationAxis>().unwrap().apply(&cfg).topology.delay, 0);
        assert!(!"feedback_plastic=false".parse::<AblationAxis>().unwrap().apply(&cfg).topology.hidden_plastic);
        assert!(!AblationAxis::Trace.apply(&cfg).dynamics.trace_learning);
        assert!("sleep".parse::<AblationAxis>().is_err());
    }

    #[test]
    fn paired_runs_share_seeds() {
        let mut cfg = ExperimentConfig::default();
        cfg.seeds.list = vec![3, 1];
        cfg.duration.tics = 200;
        cfg.duration.warmup = 0;
        let report = run_ablation(&cfg, AblationAxis::Delay).unwrap();
        assert_eq!(report.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![3, 1]);
        assert_eq!(report.table().lines().count(), 4);
    }
}
