//! The tick-driven engine.
//!
//! Each tic: clear the current history slot, integrate layers in index order
//! (delayed spikes arrive from the history ring), compute feedback currents
//! from the resolved spikes, apply the hidden-layer rules, then decay traces.
//! Motor layers learn only through [`Network::neuromodulate`].

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scoring::{penalty_gradient, project};
use crate::state::{StateVector, WeightVector};

use super::config::{DynamicsConfig, HiddenRule, SleepConfig};
use super::learning::{NeuronState, PruningReport};
use super::topology::{LayerKind, ProjectionKind, Topology};

/// Spikes emitted on one tic, per layer in local indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikeReport {
    pub tic: u64,
    pub spikes: Vec<Vec<u32>>,
    pub pruning: Option<PruningReport>,
}

impl SpikeReport {
    pub fn count(&self, layer: usize) -> usize {
        self.spikes[layer].len()
    }
}

#[derive(Clone, Debug)]
pub struct Network {
    topology: Topology,
    dynamics: DynamicsConfig,
    sleep: SleepConfig,
    offsets: Vec<usize>,
    voltage: Vec<f64>,
    trace: Vec<f64>,
    spiked: Vec<bool>,
    current: Vec<f64>,
    ff_drive: Vec<f64>,
    fb_current: Vec<f64>,
    /// `history[tic % depth][layer]` lists the layer's spikes on that tic.
    history: Vec<Vec<Vec<u32>>>,
    clock: u64,
    drive_in: Vec<Vec<usize>>,
    feedback_in: Vec<Vec<usize>>,
    k_ff: Vec<Option<usize>>,
    k_fb: Vec<Option<usize>>,
    delta: Vec<f64>,
    cospikes: Vec<u32>,
    touched: Vec<usize>,
}

impl Network {
    pub fn new(topology: Topology, dynamics: DynamicsConfig, sleep: SleepConfig) -> Result<Self> {
        dynamics.validate()?;
        sleep.validate()?;
        match topology.layers.first() {
            Some(l) if l.kind == LayerKind::Sensory => {}
            _ => return Err(Error::Config("the first layer must be sensory".into())),
        }
        let n_layers = topology.layers.len();
        let mut drive_in = vec![Vec::new(); n_layers];
        let mut feedback_in = vec![Vec::new(); n_layers];
        for (i, p) in topology.projections.iter().enumerate() {
            match p.kind {
                ProjectionKind::Feedback => feedback_in[p.target].push(i),
                _ => drive_in[p.target].push(i),
            }
        }
        let mut k_ff = vec![None; n_layers];
        let mut k_fb = vec![None; n_layers];
        for (l, layer) in topology.layers.iter().enumerate() {
            let plastic = |kind| {
                topology
                    .projections
                    .iter()
                    .any(|p| p.target == l && p.plastic && p.kind == kind)
            };
            k_ff[l] = sleep.k_ff.get(&layer.name).copied();
            k_fb[l] = sleep.k_fb.get(&layer.name).copied();
            if sleep.enabled() && plastic(ProjectionKind::Feedforward) && k_ff[l].is_none() {
                return Err(Error::Config(format!("sleep.k_ff has no entry for layer {}", layer.name)));
            }
            if sleep.enabled()
                && sleep.regularize_feedback
                && plastic(ProjectionKind::Feedback)
                && k_fb[l].is_none()
            {
                return Err(Error::Config(format!("sleep.k_fb has no entry for layer {}", layer.name)));
            }
        }
        let n = topology.neuron_count();
        let depth = dynamics.m_window + topology.max_delay() + 1;
        let max_len = topology.projections.iter().map(|p| p.len()).max().unwrap_or(0);
        let delta = topology.layers.iter().map(|l| dynamics.delta_for(&l.name)).collect();
        Ok(Self {
            delta,
            offsets: topology.offsets(),
            voltage: vec![0.0; n],
            trace: vec![0.0; n],
            spiked: vec![false; n],
            current: vec![0.0; n],
            ff_drive: vec![0.0; n],
            fb_current: vec![0.0; n],
            history: vec![vec![Vec::new(); n_layers]; depth],
            clock: 0,
            drive_in,
            feedback_in,
            k_ff,
            k_fb,
            cospikes: vec![0; max_len],
            touched: Vec::new(),
            topology,
            dynamics,
            sleep,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn dynamics(&self) -> &DynamicsConfig {
        &self.dynamics
    }

    pub fn sleep_config(&self) -> &SleepConfig {
        &self.sleep
    }

    /// Number of completed tics.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn neuron_count(&self) -> usize {
        self.voltage.len()
    }

    /// Global index of local neuron `j` in `layer`.
    pub fn global(&self, layer: usize, j: usize) -> usize {
        self.offsets[layer] + j
    }

    pub fn layer_range(&self, layer: usize) -> Range<usize> {
        self.offsets[layer]..self.offsets[layer + 1]
    }

    pub fn voltage(&self) -> &[f64] {
        &self.voltage
    }

    pub fn traces(&self) -> &[f64] {
        &self.trace
    }

    /// Global spike indicators of the last tic.
    pub fn spiked(&self) -> &[bool] {
        &self.spiked
    }

    /// Last tic's feedforward input `<w_ff, x>` per neuron.
    pub fn ff_drive(&self) -> &[f64] {
        &self.ff_drive
    }

    /// Last tic's feedback current `<w_fb, x>` per neuron.
    pub fn fb_current(&self) -> &[f64] {
        &self.fb_current
    }

    /// Local spikes of `layer` on the last completed tic.
    pub fn last_spikes(&self, layer: usize) -> &[u32] {
        self.spikes_at(layer, self.clock.wrapping_sub(1)).unwrap_or(&[])
    }

    /// Local spikes of `layer` on tic `t`, if still held in the history ring.
    pub fn spikes_at(&self, layer: usize, t: u64) -> Option<&[u32]> {
        let depth = self.history.len() as u64;
        if t >= self.clock || t + depth < self.clock + 1 {
            return None;
        }
        Some(&self.history[(t % depth) as usize][layer])
    }

    pub fn projection_weights(&self, index: usize) -> &[f64] {
        self.topology.projections[index].weights()
    }

    /// `sum_k w_jk 1_j 1_k` over feedforward targets of local neuron `j` in
    /// `layer`, using the spikes of the last tic.
    pub fn usefulness(&self, layer: usize, j: usize) -> f64 {
        let g = self.global(layer, j);
        if !self.spiked[g] {
            return 0.0;
        }
        let mut total = 0.0;
        for p in self
            .topology
            .projections
            .iter()
            .filter(|p| p.source == layer && p.kind == ProjectionKind::Feedforward)
        {
            for &syn in p.outgoing(j) {
                let syn = syn as usize;
                if self.spiked[self.offsets[p.target] + p.target_of(syn)] {
                    total += p.weights()[syn];
                }
            }
        }
        total
    }

    /// Overwrites a synapse weight; intended for probes and fixtures.
    pub fn set_weight(&mut self, projection: usize, synapse: usize, w: f64) -> Result<()> {
        let p = self
            .topology
            .projections
            .get_mut(projection)
            .ok_or_else(|| Error::Config(format!("no projection {projection}")))?;
        if synapse >= p.len() || !w.is_finite() {
            return Err(Error::Config(format!("invalid synapse {synapse} or weight {w}")));
        }
        p.set_weight(synapse, w);
        Ok(())
    }

    /// Both weight banks of a neuron over global presynaptic indices.
    pub fn neuron_state(&self, layer: usize, j: usize) -> NeuronState {
        let n = self.neuron_count();
        let mut ff = (vec![0.0; n], vec![false; n]);
        let mut fb = (vec![0.0; n], vec![false; n]);
        for p in self.topology.projections.iter().filter(|p| p.target == layer) {
            let bank = match p.kind {
                ProjectionKind::Feedforward => &mut ff,
                ProjectionKind::Feedback => &mut fb,
                ProjectionKind::Inhibitory => continue,
            };
            for k in p.incoming(j) {
                let src = self.offsets[p.source] + p.source_of(k);
                bank.0[src] = p.weights()[k];
                bank.1[src] = true;
            }
        }
        let g = self.global(layer, j);
        NeuronState {
            voltage: self.voltage[g],
            trace: self.trace[g],
            w_ff: WeightVector::masked(ff.0, ff.1).expect("lengths agree"),
            w_fb: WeightVector::masked(fb.0, fb.1).expect("lengths agree"),
            spiked: self.spiked[g],
        }
    }

    /// Global spike pattern of the last tic.
    pub fn state_vector(&self) -> StateVector {
        StateVector::from_bools(&self.spiked)
    }

    fn arrivals(history: &[Vec<Vec<u32>>], layer: usize, delay: usize, t: u64) -> &[u32] {
        if (delay as u64) > t {
            return &[];
        }
        let depth = history.len() as u64;
        &history[((t - delay as u64) % depth) as usize][layer]
    }

    /// Advances the network by one tic with `input` driving the sensory layer.
    pub fn tic(&mut self, input: &StateVector) -> Result<SpikeReport> {
        check_len(self.topology.layers[0].size, input.len())?;
        let t = self.clock;
        let depth = self.history.len() as u64;
        let slot = (t % depth) as usize;
        for spikes in &mut self.history[slot] {
            spikes.clear();
        }
        self.spiked.fill(false);
        self.ff_drive.fill(0.0);
        self.fb_current.fill(0.0);
        let theta = self.dynamics.theta;

        for l in 0..self.topology.layers.len() {
            let off = self.offsets[l];
            let mut out = std::mem::take(&mut self.history[slot][l]);
            if self.topology.layers[l].kind == LayerKind::Sensory {
                for i in input.active() {
                    self.spiked[off + i] = true;
                    out.push(i as u32);
                }
            } else {
                for &pi in &self.drive_in[l] {
                    let p = &self.topology.projections[pi];
                    let excitatory = p.kind == ProjectionKind::Feedforward;
                    for &s in Self::arrivals(&self.history, p.source, p.delay, t) {
                        for &k in p.outgoing(s as usize) {
                            let g = off + p.post[k as usize] as usize;
                            let w = p.weight[k as usize];
                            self.current[g] += w;
                            if excitatory {
                                self.ff_drive[g] += w;
                            }
                        }
                    }
                }
                let delta = self.delta[l];
                for j in 0..self.topology.layers[l].size {
                    let g = off + j;
                    let mut v = (self.voltage[g] + self.current[g] - delta).max(0.0);
                    self.current[g] = 0.0;
                    if v > theta {
                        v = 0.0;
                        self.spiked[g] = true;
                        out.push(j as u32);
                    }
                    self.voltage[g] = v;
                }
            }
            self.history[slot][l] = out;
        }

        for l in 0..self.topology.layers.len() {
            let off = self.offsets[l];
            for &pi in &self.feedback_in[l] {
                let p = &self.topology.projections[pi];
                for &s in Self::arrivals(&self.history, p.source, p.delay, t) {
                    for &k in p.outgoing(s as usize) {
                        self.fb_current[off + p.post[k as usize] as usize] += p.weight[k as usize];
                    }
                }
            }
        }

        if self.dynamics.hidden_rule == HiddenRule::Feedback {
            self.learn_hidden(t);
        }
        self.apply_penalty();

        let (decay, inc) = (self.dynamics.trace_decay, self.dynamics.trace_increment);
        for (tr, &s) in self.trace.iter_mut().zip(&self.spiked) {
            *tr = decay * (*tr + if s { inc } else { 0.0 });
        }

        self.clock += 1;
        let pruning = if self.sleep.enabled() && self.clock % self.sleep.interval == 0 {
            Some(self.sleep_regularize())
        } else {
            None
        };
        Ok(SpikeReport {
            tic: t,
            spikes: self.history[slot].clone(),
            pruning,
        })
    }

    fn learn_hidden(&mut self, t: u64) {
        let theta = self.dynamics.theta;
        for pi in 0..self.topology.projections.len() {
            let p = &self.topology.projections[pi];
            if !p.plastic || self.topology.layers[p.target].kind != LayerKind::Hidden {
                continue;
            }
            let off = self.offsets[p.target];
            let (kind, source, delay) = (p.kind, p.source, p.delay);
            let lr = match kind {
                ProjectionKind::Feedforward => self.dynamics.lr_ff,
                ProjectionKind::Feedback => self.dynamics.lr_fb,
                ProjectionKind::Inhibitory => continue,
            };
            let use_trace = self.dynamics.trace_learning;
            let p = &mut self.topology.projections[pi];
            for &s in Self::arrivals(&self.history, source, delay, t) {
                let s = s as usize;
                for idx in p.out_offsets[s] as usize..p.out_offsets[s + 1] as usize {
                    let k = p.out_synapses[idx] as usize;
                    let g = off + p.post[k] as usize;
                    let post = if use_trace {
                        self.trace[g]
                    } else if self.spiked[g] {
                        1.0
                    } else {
                        0.0
                    };
                    let signal = match kind {
                        ProjectionKind::Feedforward => self.fb_current[g],
                        _ => self.ff_drive[g] - theta,
                    };
                    let step = lr * signal * post;
                    if step != 0.0 {
                        p.weight[k] = (p.weight[k] + step).clamp(0.0, 1.0);
                    }
                }
            }
        }
    }

    fn apply_penalty(&mut self) {
        let Some(cfg) = self.dynamics.penalty else {
            return;
        };
        if self.sleep.enabled() {
            return;
        }
        for p in self.topology.projections.iter_mut().filter(|p| p.plastic) {
            let lr = match (self.topology.layers[p.target].kind, p.kind) {
                (LayerKind::Motor, _) => self.dynamics.lr_m,
                (_, ProjectionKind::Feedback) => self.dynamics.lr_fb,
                _ => self.dynamics.lr_ff,
            };
            for w in &mut p.weight {
                *w = project(&cfg, *w - lr * penalty_gradient(&cfg, *w)).clamp(0.0, 1.0);
            }
        }
    }

    /// Delivers a neuromodulatory event to `targets` (local indices in `layer`).
    ///
    /// Every plastic feedforward synapse onto those neurons moves by
    /// `lr_m * reward * cospikes`, counting the tics since `since` (at most
    /// `m_window` of them, ending with the last completed tic) on which the
    /// presynaptic spike arrived while the target spiked. Returns the number
    /// of synapses changed.
    pub fn neuromodulate(&mut self, layer: usize, targets: Range<usize>, reward: f64, since: u64) -> Result<usize> {
        let size = self
            .topology
            .layers
            .get(layer)
            .ok_or_else(|| Error::Config(format!("no layer {layer}")))?
            .size;
        if targets.end > size {
            return Err(Error::Dimension {
                expected: size,
                got: targets.end,
            });
        }
        if reward == 0.0 || self.clock == 0 {
            return Ok(0);
        }
        let start = since.max(self.clock.saturating_sub(self.dynamics.m_window as u64));
        let depth = self.history.len() as u64;
        let lr = self.dynamics.lr_m;
        let mut engaged = vec![false; size];
        let mut changed = 0;
        for pi in 0..self.topology.projections.len() {
            let p = &self.topology.projections[pi];
            if !p.plastic || p.kind != ProjectionKind::Feedforward || p.target != layer {
                continue;
            }
            for t in start..self.clock {
                let fired = &self.history[(t % depth) as usize][layer];
                let mut any = false;
                for &j in fired {
                    if targets.contains(&(j as usize)) {
                        engaged[j as usize] = true;
                        any = true;
                    }
                }
                if any {
                    for &s in Self::arrivals(&self.history, p.source, p.delay, t) {
                        for &k in p.outgoing(s as usize) {
                            if engaged[p.post[k as usize] as usize] {
                                if self.cospikes[k as usize] == 0 {
                                    self.touched.push(k as usize);
                                }
                                self.cospikes[k as usize] += 1;
                            }
                        }
                    }
                }
                for &j in fired {
                    engaged[j as usize] = false;
                }
            }
            let p = &mut self.topology.projections[pi];
            for &k in &self.touched {
                let w = &mut p.weight[k];
                *w = (*w + lr * reward * self.cospikes[k] as f64).clamp(0.0, 1.0);
                self.cospikes[k] = 0;
            }
            changed += self.touched.len();
            self.touched.clear();
        }
        Ok(changed)
    }

    /// Attention-gated reinforcement of hidden feedforward weights after the
    /// last tic, with activity `clamp(<w_ff, x> - theta, 0, 1)` and global
    /// reward signal `f_delta`.
    pub fn agrel_step(&mut self, f_delta: f64) {
        if f_delta == 0.0 || self.clock == 0 {
            return;
        }
        let t = self.clock - 1;
        let theta = self.dynamics.theta;
        let lr = self.dynamics.lr_ff;
        for pi in 0..self.topology.projections.len() {
            let p = &self.topology.projections[pi];
            if !p.plastic
                || p.kind != ProjectionKind::Feedforward
                || self.topology.layers[p.target].kind != LayerKind::Hidden
            {
                continue;
            }
            let off = self.offsets[p.target];
            let (source, delay) = (p.source, p.delay);
            let p = &mut self.topology.projections[pi];
            for &s in Self::arrivals(&self.history, source, delay, t) {
                let s = s as usize;
                for idx in p.out_offsets[s] as usize..p.out_offsets[s + 1] as usize {
                    let k = p.out_synapses[idx] as usize;
                    let g = off + p.post[k] as usize;
                    let a = (self.ff_drive[g] - theta).clamp(0.0, 1.0);
                    // summing w_fb_kj x_k over the feedback sources gives the feedback current
                    let step = lr * self.fb_current[g] * a * (1.0 - a) * f_delta;
                    p.weight[k] = (p.weight[k] + step).clamp(0.0, 1.0);
                }
            }
        }
    }

    /// Binarizes every plastic bank: the K strongest synapses of each neuron
    /// go to 1, the rest to 0.
    pub fn sleep_regularize(&mut self) -> PruningReport {
        self.regularize(false)
    }

    /// Applies the top-K rule to every bank that has a K, fixed banks
    /// included. Used once at construction to start from binary weights.
    pub fn binarize_all(&mut self) -> PruningReport {
        self.regularize(true)
    }

    fn regularize(&mut self, include_fixed: bool) -> PruningReport {
        let mut report = PruningReport::default();
        for l in 0..self.topology.layers.len() {
            let mut banks = vec![(ProjectionKind::Feedforward, self.k_ff[l])];
            if self.sleep.regularize_feedback {
                banks.push((ProjectionKind::Feedback, self.k_fb[l]));
            }
            for (kind, k) in banks {
                let Some(k) = k else { continue };
                let members: Vec<usize> = (0..self.topology.projections.len())
                    .filter(|&i| {
                        let p = &self.topology.projections[i];
                        p.target == l && (p.plastic || include_fixed) && p.kind == kind
                    })
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let mut ids = Vec::new();
                let mut weights = Vec::new();
                for j in 0..self.topology.layers[l].size {
                    ids.clear();
                    weights.clear();
                    for &pi in &members {
                        let p = &self.topology.projections[pi];
                        for syn in p.incoming(j) {
                            ids.push((pi, syn));
                            weights.push(p.weight[syn]);
                        }
                    }
                    let bank = &self.topology;
                    let mut order: Vec<usize> = (0..ids.len()).collect();
                    order.sort_by(|&a, &b| {
                        let (pa, ka) = ids[a];
                        let (pb, kb) = ids[b];
                        weights[b]
                            .total_cmp(&weights[a])
                            .then(bank.bank_index(pa, ka).cmp(&bank.bank_index(pb, kb)))
                    });
                    order.truncate(k);
                    for &(pi, syn) in &ids {
                        self.topology.projections[pi].weight[syn] = 0.0;
                    }
                    for &i in &order {
                        let (pi, syn) = ids[i];
                        self.topology.projections[pi].weight[syn] = 1.0;
                    }
                    let keep = order;
                    report.merge(PruningReport {
                        neurons: 1,
                        kept: keep.len(),
                        pruned: ids.len() - keep.len(),
                    });
                }
            }
        }
        report
    }
}
