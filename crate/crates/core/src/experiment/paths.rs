//! Path-averaged weights from sensory cells to motor areas.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{DenseMatrix, Network, ProjectionKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathDirection {
    /// `source -> via -> motor`.
    Ff,
    /// `source -> via <- motor`.
    Fb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub source: String,
    pub via: String,
    pub motor: String,
    /// Local indices of the motor area.
    pub area: Range<usize>,
    pub direction: PathDirection,
}

/// Dense `rows x cols` weights summed over every projection of `kind`
/// between two layers, indexed `[source][target]`.
fn dense_between(net: &Network, source: usize, target: usize, kind: ProjectionKind) -> Vec<Vec<f64>> {
    let topo = net.topology();
    let mut m = vec![vec![0.0; topo.layers[target].size]; topo.layers[source].size];
    for p in topo
        .projections
        .iter()
        .filter(|p| p.source == source && p.target == target && p.kind == kind)
    {
        for (s, t, w) in p.synapses() {
            m[s][t] += w;
        }
    }
    m
}

/// For each source cell `s`, the mean over via-neurons `v` and area neurons
/// `m` of `w(s->v) * w(v->m)` (or `w(m->v)` for feedback paths). A square
/// source layer is returned as a square grid, otherwise as one row.
pub fn path_average_weights(net: &Network, spec: &PathSpec) -> Result<DenseMatrix> {
    let topo = net.topology();
    let find = |name: &str| {
        topo.layer_index(name)
            .ok_or_else(|| Error::Config(format!("unknown layer `{name}`")))
    };
    let (s, v, m) = (find(&spec.source)?, find(&spec.via)?, find(&spec.motor)?);
    if spec.area.end > topo.layers[m].size || spec.area.is_empty() {
        return Err(Error::Config(format!("area {:?} outside layer {}", spec.area, spec.motor)));
    }
    let first = dense_between(net, s, v, ProjectionKind::Feedforward);
    let second: Vec<f64> = match spec.direction {
        PathDirection::Ff => dense_between(net, v, m, ProjectionKind::Feedforward)
            .iter()
            .map(|row| spec.area.clone().map(|k| row[k]).sum())
            .collect(),
        PathDirection::Fb => {
            let fb = dense_between(net, m, v, ProjectionKind::Feedback);
            (0..topo.layers[v].size)
                .map(|j| spec.area.clone().map(|k| fb[k][j]).sum())
                .collect()
        }
    };
    let paths = (topo.layers[v].size * spec.area.len()) as f64;
    let flat: Vec<f64> = first
        .iter()
        .map(|row| row.iter().zip(&second).map(|(a, b)| a * b).sum::<f64>() / paths)
        .collect();
    let n = flat.len();
    let side = (n as f64).sqrt().round() as usize;
    let (rows, cols) = if side * side == n { (side, side) } else { (1, n) };
    let mut out = DenseMatrix::zeros(rows, cols);
    for (i, v) in flat.into_iter().enumerate() {
        out.values[i / cols][i % cols] = v;
    }
    Ok(out)
}

/// `S -> V` path averages towards each of `areas` consecutive motor areas.
pub fn area_path_averages(
    net: &Network,
    areas: usize,
    area_size: usize,
    direction: PathDirection,
) -> Result<Vec<DenseMatrix>> {
    use super::build::{INSTANT, MOTOR, SENSORY};
    (0..areas)
        .map(|a| {
            path_average_weights(
                net,
                &PathSpec {
                    source: SENSORY.into(),
                    via: INSTANT.into(),
                    motor: MOTOR.into(),
                    area: a * area_size..(a + 1) * area_size,
                    direction,
                },
            )
        })
        .collect()
}
