use crate::error::{Error, Result};
use crate::nn::SgdSchedule;

use super::pool::DEFAULT_POOL_CAPACITY;

/// Action distribution of the actor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// `L` independent softmax heads over the `N` discrete positions.
    Categorical,
    /// `L` independent Gaussians over a continuous displacement in
    /// `[0, N d_s]`, means squashed through `tanh`, state-independent log-std.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpoConfig {
    pub discount: f64,
    pub clip: f64,
    pub n_step: usize,
    pub steps_per_episode: usize,
    pub max_episodes: u64,
    pub epochs_per_update: usize,
    pub entropy_coef: f64,
    pub normalize_advantages: bool,
    pub memory_size: usize,
    pub hidden_layers: Vec<usize>,
    pub schedule: SgdSchedule,
    pub policy: PolicyKind,
    /// Trailing window for the smoothed episode reward.
    pub smoothing_window: usize,
    /// Stop as soon as the best reward found reaches this value.
    pub stop_at_reward: Option<f64>,
    pub seed: u64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            discount: 0.0,
            clip: 0.2,
            n_step: 1,
            steps_per_episode: 10,
            max_episodes: 5000,
            epochs_per_update: 4,
            entropy_coef: 0.01,
            normalize_advantages: false,
            memory_size: DEFAULT_POOL_CAPACITY,
            hidden_layers: vec![256, 256],
            schedule: SgdSchedule::default(),
            policy: PolicyKind::Categorical,
            smoothing_window: 100,
            stop_at_reward: None,
            seed: 0,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(0.0..1.0).contains(&self.discount) {
            return fail("ppo_discount must lie in [0, 1)");
        }
        if !(self.clip > 0.0) {
            return fail("ppo_clip must be > 0");
        }
        if self.steps_per_episode == 0 {
            return fail("ppo_steps_per_episode must be >= 1");
        }
        if self.epochs_per_update == 0 {
            return fail("ppo_epochs must be >= 1");
        }
        if !(self.entropy_coef >= 0.0) {
            return fail("ppo_entropy_coef must be >= 0");
        }
        if self.schedule.batch_size == 0 || self.memory_size < self.schedule.batch_size {
            return fail("ppo_batch_size must be in 1..=ppo_memory_size");
        }
        if !(self.schedule.initial_lr >= 0.0)
            || !(self.schedule.decay_rate > 0.0 && self.schedule.decay_rate <= 1.0)
            || !(self.schedule.decay_steps > 0.0)
        {
            return fail("learning-rate schedule needs lr >= 0, decay rate in (0, 1], decay steps > 0");
        }
        if self.hidden_layers.contains(&0) {
            return fail("ppo_hidden sizes must be positive");
        }
        if self.smoothing_window == 0 {
            return fail("smoothing_window must be >= 1");
        }
        Ok(())
    }
}
