use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use spikescore::experiment::{
    area_path_averages, parse_seed_list, run_ablation, run_experiment, Aggregate, AblationAxis, ExperimentConfig,
    Heatmap, PathDirection, RunOutput, SeedMetrics,
};
use spikescore::lab::{suites_with_count, summarize, write_jsonl, LabRecord};

#[derive(Parser)]
#[command(name = "spikescore", version, about = "Scoring-rule neuron experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment over every seed and write metrics, aggregate and heatmaps.
    Run {
        #[command(flatten)]
        common: Common,
        /// Switch one mechanism off before running.
        #[arg(long, value_name = "AXIS")]
        ablate: Option<AblationAxis>,
    },
    /// Run the properness-lab suites.
    Properness {
        /// Seed count `N` or a list such as `1,4-6`.
        #[arg(long, default_value = "1")]
        seeds: String,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Instances per suite; defaults to the standard mix.
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Run paired baseline and ablated experiments on the same seeds.
    Ablate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "AXIS")]
        ablate: AblationAxis,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment TOML; `SPIKESCORE_<SECTION>_<KEY>` variables patch it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed count `N` or a list such as `1,4-6`; overrides the config.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => ExperimentConfig::from_toml_with_overrides("", std::env::vars())?,
        };
        if let Some(seeds) = &self.seeds {
            cfg.seeds.list = parse_seed_list(seeds)?;
            cfg.validate()?;
        }
        Ok(cfg)
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let probe = dir.join(".write-test");
    File::create(&probe).with_context(|| format!("{} is not writable", dir.display()))?;
    fs::remove_file(probe)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

fn write_metrics(path: &Path, runs: &[RunOutput]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    for r in runs {
        let rec = SeedMetrics {
            seed: r.seed,
            metrics: r.metrics.clone(),
        };
        serde_json::to_writer(&mut f, &rec)?;
        writeln!(f)?;
    }
    Ok(())
}

fn write_snapshots(dir: &Path, runs: &[RunOutput]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for r in runs {
        for s in &r.snapshots {
            let path = dir.join(format!("seed{}_{}_t{}.csv", r.seed, s.projection, s.tic));
            s.weights.write_csv(BufWriter::new(File::create(path)?))?;
        }
    }
    Ok(())
}

/// Per-area path averages, averaged over seeds.
fn write_heatmaps(dir: &Path, cfg: &ExperimentConfig, runs: &[RunOutput]) -> Result<()> {
    let act = cfg.environment.actuator();
    for (direction, tag) in [(PathDirection::Ff, "ff"), (PathDirection::Fb, "fb")] {
        let per_seed = runs
            .iter()
            .map(|r| area_path_averages(&r.network, act.areas, act.area_size, direction))
            .collect::<spikescore::Result<Vec<_>>>()?;
        for a in 0..act.areas {
            let maps = per_seed
                .iter()
                .map(|areas| Heatmap::new(areas[a].values.clone()))
                .collect::<spikescore::Result<Vec<_>>>()?;
            Heatmap::mean(&maps)?.write(dir, &format!("area{a}_{tag}"))?;
        }
    }
    Ok(())
}

fn print_aggregate(agg: &Aggregate) {
    let (pc, rate) = (&agg.percent_correct, &agg.correct_per_1000_tics);
    println!(
        "seeds {}  percent_correct mean {:.2} median {:.2} std {:.2}  correct_per_1000 mean {:.2} median {:.2} std {:.2}",
        pc.n, pc.mean, pc.median, pc.std, rate.mean, rate.median, rate.std
    );
}

fn cmd_run(common: &Common, ablate: Option<AblationAxis>) -> Result<()> {
    let mut cfg = common.load()?;
    if let Some(axis) = ablate {
        cfg = axis.apply(&cfg);
    }
    prepare_out(&common.out)?;
    fs::write(common.out.join("config.toml"), cfg.to_toml_string())?;
    let runs = run_experiment(&cfg)?;
    write_metrics(&common.out.join("metrics.jsonl"), &runs)?;
    let agg = Aggregate::of(runs.iter().map(|r| &r.metrics));
    write_json(&common.out.join("aggregate.json"), &agg)?;
    if !runs.is_empty() {
        write_heatmaps(&common.out.join("heatmaps"), &cfg, &runs)?;
        write_snapshots(&common.out.join("snapshots"), &runs)?;
    }
    print_aggregate(&agg);
    Ok(())
}

/// Returns whether every instance that was not refused passed.
fn cmd_properness(seeds: &str, out: &Path, instances: Option<usize>) -> Result<bool> {
    let seeds = parse_seed_list(seeds)?;
    prepare_out(out)?;
    let records: Vec<LabRecord> = seeds.iter().flat_map(|&s| suites_with_count(s, instances)).collect();
    write_jsonl(&records, BufWriter::new(File::create(out.join("properness.jsonl"))?))?;
    let summary = summarize(&records);
    write_json(&out.join("properness_summary.json"), &summary)?;
    for s in &summary {
        println!(
            "{:<18} {:<3} {:>4}/{:<4} worst_gap {:.2e} worst_distance {:.2e} worst_residual {:.2e}",
            s.suite, s.regularizer, s.passed, s.count, s.worst_gap, s.worst_distance, s.worst_residual
        );
    }
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "{} instance {} seed {}: {}",
            r.suite,
            r.instance,
            r.seed,
            r.error.as_deref().unwrap_or_default()
        );
    }
    let ok = records.iter().all(|r| r.verdict || r.error.is_some());
    println!("{} records, {}", records.len(), if ok { "all passed" } else { "FAILURES" });
    Ok(ok)
}

fn cmd_ablate(common: &Common, axis: AblationAxis) -> Result<()> {
    let cfg = common.load()?;
    if cfg.seeds.list.is_empty() {
        bail!("ablation needs at least one seed");
    }
    prepare_out(&common.out)?;
    let report = run_ablation(&cfg, axis)?;
    write_json(&common.out.join("ablation.json"), &report)?;
    let table = report.table();
    fs::write(common.out.join("ablation.tsv"), &table)?;
    print!("{table}");
    println!(
        "delta percent_correct {:+.2}  delta correct_per_1000 {:+.2}",
        report.delta_percent_correct(),
        report.delta_correct_per_1000_tics()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, ablate } => cmd_run(common, *ablate).map(|_| true),
        Command::Properness { seeds, out, instances } => cmd_properness(seeds, out, *instances),
        Command::Ablate { common, ablate } => cmd_ablate(common, *ablate).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
