//! Geometry, line-of-sight channels and the closed-form uplink SINR.

mod channel;
mod geometry;
mod spectral;

pub use channel::{build_channels, ChannelKind, ChannelSet};
pub use geometry::{build_geometry, Geometry};
pub use spectral::{combined_signal_terms, sinr_and_se, CombinedTerms, Scenario, SeReport};
