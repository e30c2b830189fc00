//! Scoring-rule neurons.
//!
//! Threshold neurons that maximize a regularized reward behave like traders
//! under a proper scoring rule: their weights settle on a link function of
//! the expected utility seen when pre- and post-synaptic neurons cospike.
//! This crate provides the scoring kernel ([`scoring`], [`bregman`]), the
//! utility functions ([`utility`]), brute-force verification of the
//! properness and fixed-point claims ([`lab`]), a tick-driven network engine
//! ([`sim`]), and the Tracker/Foveator tasks with their experiment runner
//! ([`env`], [`experiment`]).

pub mod bregman;
pub mod env;
pub mod error;
pub mod experiment;
pub mod lab;
pub mod scoring;
pub mod sim;
pub mod state;
pub mod utility;

pub use error::{Error, Result};
pub use scoring::{Regularizer, ScoringConfig, Utility};
pub use state::{StateVector, WeightVector};
