//! The experiment loop: network, world and actuators stepped in lockstep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{ActuatorBank, Environment, FoveatorWorld, Metrics, TrackerWorld};
use crate::error::{Error, Result};
use crate::sim::{DenseMatrix, HiddenRule, Network};

use super::build::{build_network, MOTOR};
use super::config::{ExperimentConfig, TaskKind};
use super::probe::UsefulnessProbe;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub tic: u64,
    pub projection: String,
    pub weights: DenseMatrix,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub seed: u64,
    pub metrics: Metrics,
    pub snapshots: Vec<Snapshot>,
    pub network: Network,
}

/// Per-seed metrics record for line-delimited logs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: Metrics,
}

fn snapshot(net: &Network, cfg: &ExperimentConfig) -> Vec<Snapshot> {
    let topo = net.topology();
    topo.projections
        .iter()
        .filter(|p| {
            if cfg.snapshots.projections.is_empty() {
                p.plastic
            } else {
                cfg.snapshots.projections.iter().any(|n| n == &p.name)
            }
        })
        .map(|p| Snapshot {
            tic: net.clock(),
            projection: p.name.clone(),
            weights: DenseMatrix::from_projection(p, topo.layers[p.source].size, topo.layers[p.target].size),
        })
        .collect()
}

fn setup(cfg: &ExperimentConfig, seed: u64) -> Result<(Network, Box<dyn Environment>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = build_network(cfg, &mut rng)?;
    let world_seed: u64 = rng.gen();
    let world: Box<dyn Environment> = match cfg.environment.kind {
        TaskKind::Tracker => Box::new(TrackerWorld::new(cfg.environment.tracker(), world_seed)?),
        TaskKind::Foveator => Box::new(FoveatorWorld::new(cfg.environment.foveator(), world_seed)?),
    };
    Ok((net, world))
}

/// Runs one seed of `cfg`.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let (mut net, mut world) = setup(cfg, seed)?;
    run_loop(cfg, seed, &mut net, world.as_mut(), None)
}

/// Runs one seed while estimating the usefulness of layer `via` to M.
pub fn run_seed_probed(cfg: &ExperimentConfig, seed: u64, via: &str) -> Result<(RunOutput, UsefulnessProbe)> {
    let (mut net, mut world) = setup(cfg, seed)?;
    let mut probe = UsefulnessProbe::new(&net, via)?;
    let out = run_loop(cfg, seed, &mut net, world.as_mut(), Some(&mut probe))?;
    Ok((out, probe))
}

/// Steps `net` against `world` for the configured duration.
pub fn run_loop(
    cfg: &ExperimentConfig,
    seed: u64,
    net: &mut Network,
    world: &mut dyn Environment,
    mut probe: Option<&mut UsefulnessProbe>,
) -> Result<RunOutput> {
    let motor = net
        .topology()
        .layer_index(MOTOR)
        .ok_or_else(|| Error::Config(format!("network has no {MOTOR} layer")))?;
    let mut bank = ActuatorBank::new(cfg.environment.actuator())?;
    let areas = world.areas();
    let mut metrics = Metrics::new(areas);
    let mut last_event = vec![0u64; areas];
    let mut snapshots = Vec::new();
    let agrel = cfg.dynamics.hidden_rule == HiddenRule::Agrel;
    let mut input = world.observe();
    for t in 0..cfg.duration.tics {
        let report = net.tic(&input)?;
        let engaged = bank.push(&report.spikes[motor]);
        let step = world.step(&engaged);
        let measuring = t >= cfg.duration.warmup;
        if measuring {
            metrics.tick();
        }
        let mut total_reward = 0.0;
        for (a, r) in step.rewards.iter().enumerate() {
            let Some(r) = r else { continue };
            net.neuromodulate(motor, bank.area_range(a), r.get(), last_event[a])?;
            last_event[a] = net.clock();
            total_reward += r.get();
            if measuring {
                metrics.record(a, r.get() > 0.0);
            }
        }
        if agrel {
            net.agrel_step(total_reward);
        }
        if let Some(probe) = probe.as_deref_mut() {
            probe.observe(net, &bank, &step.rewards)?;
        }
        if cfg.snapshots.interval > 0 && net.clock() % cfg.snapshots.interval == 0 {
            snapshots.extend(snapshot(net, cfg));
        }
        input = step.input;
    }
    if cfg.snapshots.interval == 0 || net.clock() % cfg.snapshots.interval != 0 {
        snapshots.extend(snapshot(net, cfg));
    }
    metrics.finalize();
    Ok(RunOutput {
        seed,
        metrics,
        snapshots,
        network: net.clone(),
    })
}

/// Runs every configured seed concurrently, in seed-list order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunOutput>> {
    cfg.validate()?;
    cfg.seeds.list.par_iter().map(|&seed| run_seed(cfg, seed)).collect()
}
