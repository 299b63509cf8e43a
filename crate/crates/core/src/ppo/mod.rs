//! Placement MDP and a PPO trainer.
//!
//! The environment is static: the reward of an action is the sum SE of the
//! placement it encodes, independent of the state. The state still carries
//! the previous action, its reward and the per-TA SE, so the policy sees
//! `L + 1 + K` features. With the default discount of zero the process is a
//! contextual bandit and PPO reduces to clipped policy-gradient steps on
//! `r - V(s)`.

mod agent;
mod clip;
mod config;
mod env;
mod policy;
mod pool;
mod returns;
mod train;

pub use agent::{PpoAgent, PreparedBatch, UpdateStats};
pub use clip::{clipped_objective, ClippedSurrogate};
pub use config::{PolicyKind, PpoConfig};
pub use env::{Action, FeatureScale, MdpState, PlacementEnv};
pub use policy::{sample_action, GaussianHeads, PolicyHeads};
pub use pool::{ExperiencePool, Transition, DEFAULT_POOL_CAPACITY};
pub use returns::{advantage, n_step_target, target_value};
pub use train::{train, EpisodeRecord, Trainer, TrainingLog};
