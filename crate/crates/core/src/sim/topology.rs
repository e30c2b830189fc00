//! Layered network structure: neuron groups and masked, delayed projections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayerKind {
    /// Externally driven; its spikes are the input pattern.
    Sensory,
    /// Learns from feedback utility (V, D).
    Hidden,
    /// Learns from the neuromodulator (M).
    Motor,
    /// Fixed negative-effect neurons.
    Inhibitory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub name: String,
    pub kind: LayerKind,
    pub size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProjectionKind {
    /// Drives the target's voltage; plastic under the target layer's rule.
    Feedforward,
    /// Never drives voltage; its current is the target's feedback utility.
    Feedback,
    /// Drives voltage with fixed negative weights.
    Inhibitory,
}

/// A bundle of synapses from one layer to another, all with the same delay.
///
/// Synapses are stored grouped by target (CSR); `outgoing` indexes the same
/// synapses by source so spike delivery only touches active sources.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub kind: ProjectionKind,
    pub delay: usize,
    pub plastic: bool,
    pub(crate) pre: Vec<u32>,
    pub(crate) post: Vec<u32>,
    pub(crate) weight: Vec<f64>,
    pub(crate) in_offsets: Vec<u32>,
    pub(crate) out_offsets: Vec<u32>,
    pub(crate) out_synapses: Vec<u32>,
    /// Position of each synapse within its target neuron's bank; breaks
    /// ties during sleep.
    pub(crate) bank_index: Vec<u32>,
}

impl Projection {
    /// Builds a projection from `(source, target, weight)` triples in local
    /// indices. Duplicate pairs are rejected.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        source: usize,
        target: usize,
        source_size: usize,
        target_size: usize,
        kind: ProjectionKind,
        delay: usize,
        plastic: bool,
        mut synapses: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let name = name.into();
        synapses.sort_by_key(|&(s, t, _)| (t, s));
        for pair in synapses.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::Config(format!(
                    "projection {name}: duplicate synapse {} -> {}",
                    pair[0].0, pair[0].1
                )));
            }
        }
        let mut pre = Vec::with_capacity(synapses.len());
        let mut post = Vec::with_capacity(synapses.len());
        let mut weight = Vec::with_capacity(synapses.len());
        let mut in_offsets = vec![0u32; target_size + 1];
        let mut out_counts = vec![0u32; source_size + 1];
        for &(s, t, w) in &synapses {
            if s >= source_size || t >= target_size {
                return Err(Error::Config(format!(
                    "projection {name}: synapse {s} -> {t} out of range"
                )));
            }
            if !w.is_finite() {
                return Err(Error::Config(format!("projection {name}: non-finite weight")));
            }
            pre.push(s as u32);
            post.push(t as u32);
            weight.push(w);
            in_offsets[t + 1] += 1;
            out_counts[s + 1] += 1;
        }
        for t in 0..target_size {
            in_offsets[t + 1] += in_offsets[t];
        }
        let mut out_offsets = out_counts;
        for s in 0..source_size {
            out_offsets[s + 1] += out_offsets[s];
        }
        let mut fill = out_offsets.clone();
        let mut out_synapses = vec![0u32; pre.len()];
        for (k, &s) in pre.iter().enumerate() {
            out_synapses[fill[s as usize] as usize] = k as u32;
            fill[s as usize] += 1;
        }
        Ok(Self {
            name,
            source,
            target,
            kind,
            delay,
            plastic,
            pre,
            post,
            weight,
            in_offsets,
            out_offsets,
            out_synapses,
            bank_index: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    /// `(source, target, weight)` in local indices, grouped by target.
    pub fn synapses(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).map(|k| (self.pre[k] as usize, self.post[k] as usize, self.weight[k]))
    }

    /// Synapse ids onto local target `t`.
    pub fn incoming(&self, t: usize) -> std::ops::Range<usize> {
        self.in_offsets[t] as usize..self.in_offsets[t + 1] as usize
    }

    /// Synapse ids leaving local source `s`.
    pub fn outgoing(&self, s: usize) -> &[u32] {
        &self.out_synapses[self.out_offsets[s] as usize..self.out_offsets[s + 1] as usize]
    }

    pub fn source_of(&self, k: usize) -> usize {
        self.pre[k] as usize
    }

    pub fn target_of(&self, k: usize) -> usize {
        self.post[k] as usize
    }

    /// Weight of `s -> t`, if that synapse exists.
    pub fn weight_between(&self, s: usize, t: usize) -> Option<f64> {
        self.incoming(t)
            .find(|&k| self.pre[k] as usize == s)
            .map(|k| self.weight[k])
    }

    pub(crate) fn set_weight(&mut self, k: usize, w: f64) {
        self.weight[k] = w;
    }
}

/// Layers in integration order plus the projections between them.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    pub layers: Vec<Layer>,
    pub projections: Vec<Projection>,
}

impl Topology {
    pub fn new(layers: Vec<Layer>, projections: Vec<Projection>) -> Result<Self> {
        let mut topo = Self {
            layers,
            projections,
        };
        topo.validate()?;
        topo.number_banks(|_, ids| ids);
        Ok(topo)
    }

    pub fn layer_index(&self, name: &str) -> Option<usize> {
        self.layers.iter().position(|l| l.name == name)
    }

    pub fn projection_index(&self, name: &str) -> Option<usize> {
        self.projections.iter().position(|p| p.name == name)
    }

    pub fn max_delay(&self) -> usize {
        self.projections.iter().map(|p| p.delay).max().unwrap_or(0)
    }

    /// Global index of the first neuron of each layer.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.layers.len() + 1);
        let mut acc = 0;
        out.push(0);
        for l in &self.layers {
            acc += l.size;
            out.push(acc);
        }
        out
    }

    pub fn neuron_count(&self) -> usize {
        self.layers.iter().map(|l| l.size).sum()
    }

    /// Bank position of synapse `k` in projection `p`.
    pub fn bank_index(&self, p: usize, k: usize) -> usize {
        self.projections[p].bank_index[k] as usize
    }

    /// Numbers every neuron's feedforward and feedback banks; `order`
    /// receives the neuron's global index and its synapses as
    /// `(projection, synapse)` pairs in projection order and returns them
    /// in bank order.
    fn number_banks<F>(&mut self, mut order: F)
    where
        F: FnMut(usize, Vec<(usize, usize)>) -> Vec<(usize, usize)>,
    {
        for p in &mut self.projections {
            p.bank_index = vec![0; p.len()];
        }
        let offsets = self.offsets();
        for (l, layer) in self.layers.iter().enumerate() {
            for feedback in [false, true] {
                let members: Vec<usize> = (0..self.projections.len())
                    .filter(|&i| {
                        let p = &self.projections[i];
                        p.target == l
                            && p.kind != ProjectionKind::Inhibitory
                            && (p.kind == ProjectionKind::Feedback) == feedback
                    })
                    .collect();
                for j in 0..layer.size {
                    let ids: Vec<(usize, usize)> = members
                        .iter()
                        .flat_map(|&pi| self.projections[pi].incoming(j).map(move |k| (pi, k)))
                        .collect();
                    for (rank, (pi, k)) in order(offsets[l] + j, ids).into_iter().enumerate() {
                        self.projections[pi].bank_index[k] = rank as u32;
                    }
                }
            }
        }
    }

    /// Renumbers every bank in a random order, so sleep ties are broken
    /// without favoring low neuron indices.
    pub fn shuffle_banks<R: rand::Rng>(&mut self, rng: &mut R) {
        use rand::seq::SliceRandom;
        self.number_banks(|_, mut ids| {
            ids.shuffle(rng);
            ids
        });
    }

    fn validate(&self) -> Result<()> {
        let mut names = std::collections::HashSet::new();
        for l in &self.layers {
            if !names.insert(l.name.as_str()) {
                return Err(Error::Config(format!("duplicate layer name {}", l.name)));
            }
        }
        for p in &self.projections {
            let (Some(src), Some(dst)) = (self.layers.get(p.source), self.layers.get(p.target)) else {
                return Err(Error::Config(format!("projection {} references a missing layer", p.name)));
            };
            if p.in_offsets.len() != dst.size + 1 || p.out_offsets.len() != src.size + 1 {
                return Err(Error::Config(format!(
                    "projection {} was built for different layer sizes",
                    p.name
                )));
            }
            if dst.kind == LayerKind::Sensory {
                return Err(Error::Config(format!("projection {} targets the sensory layer", p.name)));
            }
            let touches_inh = src.kind == LayerKind::Inhibitory || dst.kind == LayerKind::Inhibitory;
            if p.plastic && (touches_inh || p.kind == ProjectionKind::Inhibitory) {
                return Err(Error::Config(format!(
                    "projection {} touches inhibitory neurons and cannot be plastic",
                    p.name
                )));
            }
            if (p.kind == ProjectionKind::Inhibitory) != (src.kind == LayerKind::Inhibitory) {
                return Err(Error::Config(format!(
                    "projection {}: inhibitory projections must leave inhibitory layers",
                    p.name
                )));
            }
            if p.kind == ProjectionKind::Inhibitory && p.weight.iter().any(|&w| w > 0.0) {
                return Err(Error::Config(format!("projection {} has excitatory inhibitory weights", p.name)));
            }
            // Voltage-driving zero-delay edges need their source resolved earlier in the tic.
            if p.kind != ProjectionKind::Feedback && p.delay == 0 && p.source >= p.target {
                return Err(Error::Config(format!(
                    "projection {} runs against the integration order with zero delay",
                    p.name
                )));
            }
        }
        // Feedforward and feedback banks of a neuron come from disjoint populations.
        for a in &self.projections {
            for b in &self.projections {
                if a.kind == ProjectionKind::Feedforward
                    && b.kind == ProjectionKind::Feedback
                    && a.target == b.target
                    && a.source == b.source
                {
                    return Err(Error::Config(format!(
                        "projections {} and {} share a source population",
                        a.name, b.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(name: &str, kind: LayerKind, size: usize) -> Layer {
        Layer {
            name: name.into(),
            kind,
            size,
        }
    }

    #[test]
    fn csr_indexes_agree() {
        let p = Projection::new(
            "p",
            0,
            1,
            3,
            2,
            ProjectionKind::Feedforward,
            0,
            true,
            vec![(2, 0, 0.5), (0, 1, 0.1), (0, 0, 0.2), (1, 1, 0.3)],
        )
        .unwrap();
        assert_eq!(p.incoming(0).len(), 2);
        for s in 0..3 {
            for &k in p.outgoing(s) {
                assert_eq!(p.source_of(k as usize), s);
            }
        }
        assert_eq!(p.weight_between(2, 0), Some(0.5));
        assert_eq!(p.weight_between(2, 1), None);
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        let dup = vec![(0, 0, 0.1), (0, 0, 0.2)];
        assert!(Projection::new("p", 0, 1, 1, 1, ProjectionKind::Feedforward, 0, true, dup).is_err());
        let oob = vec![(3, 0, 0.1)];
        assert!(Projection::new("p", 0, 1, 1, 1, ProjectionKind::Feedforward, 0, true, oob).is_err());
    }

    #[test]
    fn plastic_inhibitory_edges_are_rejected() {
        let layers = vec![
            layer("S", LayerKind::Sensory, 2),
            layer("INH", LayerKind::Inhibitory, 1),
            layer("V", LayerKind::Hidden, 1),
        ];
        let into_inh =
            Projection::new("s_inh", 0, 1, 2, 1, ProjectionKind::Feedforward, 0, true, vec![(0, 0, 0.1)]).unwrap();
        assert!(Topology::new(layers.clone(), vec![into_inh]).is_err());
        let out_inh =
            Projection::new("inh_v", 1, 2, 1, 1, ProjectionKind::Inhibitory, 0, false, vec![(0, 0, -0.5)]).unwrap();
        assert!(Topology::new(layers, vec![out_inh]).is_ok());
    }

    #[test]
    fn backward_zero_delay_drive_is_rejected() {
        let layers = vec![
            layer("S", LayerKind::Sensory, 1),
            layer("V", LayerKind::Hidden, 1),
            layer("M", LayerKind::Motor, 1),
        ];
        let back = |delay, kind| {
            Projection::new("m_v", 2, 1, 1, 1, kind, delay, false, vec![(0, 0, 0.1)]).unwrap()
        };
        assert!(Topology::new(layers.clone(), vec![back(0, ProjectionKind::Feedforward)]).is_err());
        assert!(Topology::new(layers.clone(), vec![back(1, ProjectionKind::Feedforward)]).is_ok());
        assert!(Topology::new(layers, vec![back(0, ProjectionKind::Feedback)]).is_ok());
    }

    #[test]
    fn feedforward_and_feedback_sources_must_differ() {
        let layers = vec![layer("S", LayerKind::Sensory, 1), layer("V", LayerKind::Hidden, 1)];
        let ff = Projection::new("ff", 0, 1, 1, 1, ProjectionKind::Feedforward, 0, true, vec![(0, 0, 0.1)]).unwrap();
        let fb = Projection::new("fb", 0, 1, 1, 1, ProjectionKind::Feedback, 0, true, vec![(0, 0, 0.1)]).unwrap();
        assert!(Topology::new(layers, vec![ff, fb]).is_err());
    }
}
