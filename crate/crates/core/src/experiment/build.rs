//! Random wiring of the Tracker and Foveator architectures.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::sim::{Layer, LayerKind, Network, Projection, ProjectionKind, Topology};

use super::config::{ExperimentConfig, TaskKind};

/// Layer names used by the built architectures.
pub const SENSORY: &str = "S";
pub const INSTANT: &str = "V";
pub const DELAYED: &str = "D";
pub const INHIBITORY: &str = "INH";
pub const MOTOR: &str = "M";

fn random_synapses(
    rng: &mut ChaCha8Rng,
    sources: usize,
    targets: usize,
    p: f64,
    weight: &mut dyn FnMut(&mut ChaCha8Rng) -> f64,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for t in 0..targets {
        for s in 0..sources {
            if p >= 1.0 || rng.gen_bool(p) {
                out.push((s, t, weight(rng)));
            }
        }
    }
    out
}

/// Builds the network for `cfg` with weights drawn from `rng`.
///
/// Layers are ordered S, V, [D], [INH], M. Hidden layers receive plastic
/// feedforward input from S (D through the delay line) and plastic
/// feedback from M; M receives plastic input from the hidden layers and
/// fixed inhibition.
pub fn build_network(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Network> {
    cfg.validate()?;
    let topo = &cfg.topology;
    let env = &cfg.environment;
    let s_size = env.grid * env.grid;
    let m_size = env.actuator().areas * env.area_size;
    let use_d = cfg.environment.kind == TaskKind::Tracker && topo.d > 0;

    let mut layers = vec![
        Layer {
            name: SENSORY.into(),
            kind: LayerKind::Sensory,
            size: s_size,
        },
        Layer {
            name: INSTANT.into(),
            kind: LayerKind::Hidden,
            size: topo.v,
        },
    ];
    if use_d {
        layers.push(Layer {
            name: DELAYED.into(),
            kind: LayerKind::Hidden,
            size: topo.d,
        });
    }
    if topo.inh > 0 {
        layers.push(Layer {
            name: INHIBITORY.into(),
            kind: LayerKind::Inhibitory,
            size: topo.inh,
        });
    }
    layers.push(Layer {
        name: MOTOR.into(),
        kind: LayerKind::Motor,
        size: m_size,
    });
    let idx = |name: &str| layers.iter().position(|l| l.name == name);
    let s = idx(SENSORY).expect("sensory layer");
    let m = idx(MOTOR).expect("motor layer");
    let inh = idx(INHIBITORY);
    let mut hidden = vec![(idx(INSTANT).expect("instant layer"), 0usize, topo.p_sv)];
    if let Some(d) = idx(DELAYED) {
        hidden.push((d, topo.delay, topo.p_sd));
    }

    let init = topo.init_max;
    let mut plastic_w = |r: &mut ChaCha8Rng| r.gen_range(0.0..init);
    let mut projections = Vec::new();
    for &(h, delay, p) in &hidden {
        let hn = &layers[h].name;
        let size = layers[h].size;
        projections.push(Projection::new(
            format!("{SENSORY}_{hn}"),
            s,
            h,
            s_size,
            size,
            ProjectionKind::Feedforward,
            delay,
            topo.hidden_plastic,
            random_synapses(rng, s_size, size, p, &mut plastic_w),
        )?);
        projections.push(Projection::new(
            format!("{hn}_{MOTOR}"),
            h,
            m,
            size,
            m_size,
            ProjectionKind::Feedforward,
            0,
            true,
            random_synapses(rng, size, m_size, topo.p_hm, &mut plastic_w),
        )?);
        projections.push(Projection::new(
            format!("{MOTOR}_{hn}"),
            m,
            h,
            m_size,
            size,
            ProjectionKind::Feedback,
            topo.feedback_delay,
            topo.hidden_plastic,
            random_synapses(rng, m_size, size, topo.p_fb, &mut plastic_w),
        )?);
    }
    if let Some(i) = inh {
        let n = layers[i].size;
        let w_in = topo.w_inh_in;
        for &(h, _, _) in &hidden {
            let hn = &layers[h].name;
            projections.push(Projection::new(
                format!("{hn}_{INHIBITORY}"),
                h,
                i,
                layers[h].size,
                n,
                ProjectionKind::Feedforward,
                0,
                false,
                random_synapses(rng, layers[h].size, n, topo.p_inh_in, &mut |_| w_in),
            )?);
        }
        let w_out = -topo.w_inh;
        projections.push(Projection::new(
            format!("{INHIBITORY}_{MOTOR}"),
            i,
            m,
            n,
            m_size,
            ProjectionKind::Inhibitory,
            0,
            false,
            random_synapses(rng, n, m_size, topo.p_inh_out, &mut |_| w_out),
        )?);
    }
    let mut topology = Topology::new(layers, projections)?;
    topology.shuffle_banks(rng);
    let mut net = Network::new(topology, cfg.dynamics.clone(), cfg.sleep.clone())?;
    if topo.binary_init {
        net.binarize_all();
    }
    Ok(net)
}
