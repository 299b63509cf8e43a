//! Uplink spectral-efficiency simulation and antenna-position optimization
//! for a cell-free massive MIMO deployment along a high-speed railway, where
//! every access point carries one antenna that slides along a short rail.
//!
//! The crate is organized bottom-up:
//!
//! - [`scenario`] and [`model`]: geometry, line-of-sight channels with a
//!   Doppler displacement term, and the closed-form per-TA SINR / SE.
//! - [`optimize`]: exhaustive, random, greedy and fixed-antenna baselines
//!   over the sum-SE objective.
//! - [`nn`]: a small tanh MLP with exact backpropagation and plain SGD.
//! - [`ppo`]: the placement MDP and a PPO trainer with factorized
//!   categorical (or optional Gaussian) antenna-position heads.
//! - [`harness`]: key-value experiment configs, sweeps and CSV output.

pub mod error;
pub mod harness;
pub mod model;
pub mod nn;
pub mod optimize;
pub mod placement;
pub mod ppo;
pub mod scenario;

pub use error::{Error, Result};
pub use model::{ChannelKind, Scenario, SeReport};
pub use placement::Placement;
pub use scenario::{Layout, ScenarioConfig};
