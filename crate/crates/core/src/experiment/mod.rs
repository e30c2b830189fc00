//! Configured experiments: building, running and summarizing networks.

pub mod ablation;
pub mod aggregate;
pub mod build;
pub mod config;
pub mod heatmap;
pub mod paths;
pub mod probe;
pub mod run;
pub mod seeds;

pub use ablation::{run_ablation, AblationAxis, AblationReport, AblationRow};
pub use aggregate::{Aggregate, Summary};
pub use build::build_network;
pub use config::{ExperimentConfig, TaskKind};
pub use heatmap::{parse_pgm, Heatmap, HeatmapFiles, Pgm};
pub use paths::{area_path_averages, path_average_weights, PathDirection, PathSpec};
pub use probe::{UsefulnessProbe, UsefulnessReport};
pub use run::{run_experiment, run_loop, run_seed, run_seed_probed, RunOutput, SeedMetrics, Snapshot};
pub use seeds::parse_seed_list;
