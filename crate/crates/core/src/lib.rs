//! Monte Carlo simulation of a rotating 3.5 GHz coastal radar sharing
//! spectrum with outdoor Wi-Fi networks that use directional antennas.
//!
//! A run draws many independent deployments ("drops"), elects one
//! transmitter per network under EDCA or CSMA contention, and measures
//! the peak aggregate interference the radar sees over a rotation along
//! with the priority-weighted SINR of the Wi-Fi links while the beam
//! sweeps them. With mitigation enabled, networks favour transmitters
//! whose beams point away from the radar during the sweep.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod mac;
pub mod preset;
pub mod propagation;

pub use config::{parse_config, SimConfig};
pub use engine::{run, run_with_workers, sweep_parameter, RunResult, SweepAxis};
pub use error::{ConfigError, Error, Result};
