//! Spiking network engine: topology, dynamics, plasticity and sleep.

pub mod config;
pub mod learning;
pub mod network;
pub mod snapshot;
pub mod topology;

pub use config::{DynamicsConfig, HiddenRule, SleepConfig};
pub use learning::{
    agrel_update, feedback_score, learn_fb, learn_ff, learn_m, penalty_delta, sleep_regularize, top_k,
    NeuronState, PruningReport,
};
pub use network::{Network, SpikeReport};
pub use snapshot::DenseMatrix;
pub use topology::{Layer, LayerKind, Projection, ProjectionKind, Topology};
