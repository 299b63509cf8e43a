use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::agent::{PpoAgent, UpdateStats};
use super::config::PpoConfig;
use super::env::{Action, PlacementEnv};
use super::pool::{ExperiencePool, Transition};
use crate::error::Result;
use crate::model::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub episode: u64,
    /// Mean reward over the episode's steps.
    pub reward_raw: f64,
    /// Trailing mean of `reward_raw` over the smoothing window.
    pub reward_smoothed: f64,
    pub lr: f64,
    /// Highest-reward action of this episode and its reward.
    pub episode_best_action: Action,
    pub episode_best_reward: f64,
    /// Best reward seen since training began.
    pub best_so_far: f64,
    pub update: Option<UpdateStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    pub episodes: Vec<EpisodeRecord>,
    pub best_action: Option<Action>,
    pub best_reward: f64,
    /// Objective evaluations, the all-ones reset included.
    pub evaluations: u64,
}

/// Step-wise PPO training loop; one update after every episode once the pool
/// holds a full mini-batch.
pub struct Trainer<'a> {
    env: PlacementEnv<'a>,
    agent: PpoAgent,
    pool: ExperiencePool,
    rng: ChaCha8Rng,
    config: PpoConfig,
    episode: u64,
    window: VecDeque<f64>,
    window_sum: f64,
    log: TrainingLog,
}

impl<'a> Trainer<'a> {
    pub fn new(scenario: &'a Scenario, config: &PpoConfig) -> Result<Self> {
        config.validate()?;
        let env = PlacementEnv::new(scenario);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let agent = PpoAgent::new(&env, config, &mut rng)?;
        let log = TrainingLog {
            episodes: Vec::new(),
            best_action: None,
            best_reward: f64::NEG_INFINITY,
            evaluations: env.evaluations(),
        };
        Ok(Self {
            env,
            agent,
            pool: ExperiencePool::new(config.memory_size),
            rng,
            config: config.clone(),
            episode: 0,
            window: VecDeque::new(),
            window_sum: 0.0,
            log,
        })
    }

    pub fn agent(&self) -> &PpoAgent {
        &self.agent
    }

    pub fn pool(&self) -> &ExperiencePool {
        &self.pool
    }

    pub fn log(&self) -> &TrainingLog {
        &self.log
    }

    pub fn into_parts(self) -> (PpoAgent, TrainingLog) {
        (self.agent, self.log)
    }

    fn done(&self) -> bool {
        self.episode >= self.config.max_episodes
            || self
                .config
                .stop_at_reward
                .is_some_and(|target| self.log.best_reward >= target)
    }

    /// Runs one episode and, if the pool is large enough, one update.
    pub fn run_episode(&mut self) -> Result<&EpisodeRecord> {
        let lr = self.config.schedule.lr(self.episode);
        let mut state = self.env.reset();
        let mut total = 0.0;
        let mut best: Option<(Action, f64)> = None;
        for step in 0..self.config.steps_per_episode {
            let (action, log_prob) = self.agent.act(&state, &mut self.rng)?;
            let value = self.agent.value(&state)?;
            let (next_state, reward) = self.env.step_action(&action)?;
            total += reward;
            if best.as_ref().is_none_or(|(_, r)| reward > *r) {
                best = Some((next_state.last_action.clone(), reward));
            }
            self.pool.push(Transition {
                state,
                action,
                reward,
                next_state: next_state.clone(),
                joint_log_prob: log_prob,
                value_estimate: value,
                episode: self.episode,
                step,
            });
            state = next_state;
        }
        let update = if self.pool.len() >= self.config.schedule.batch_size {
            Some(self.agent.update(&self.pool, lr, &mut self.rng)?)
        } else {
            None
        };

        let reward_raw = total / self.config.steps_per_episode as f64;
        self.window.push_back(reward_raw);
        self.window_sum += reward_raw;
        if self.window.len() > self.config.smoothing_window {
            self.window_sum -= self.window.pop_front().expect("non-empty");
        }
        let (episode_best_action, episode_best_reward) = best.expect("at least one step");
        if episode_best_reward > self.log.best_reward {
            self.log.best_reward = episode_best_reward;
            self.log.best_action = Some(episode_best_action.clone());
        }
        self.log.evaluations = self.env.evaluations();
        self.log.episodes.push(EpisodeRecord {
            episode: self.episode,
            reward_raw,
            reward_smoothed: self.window_sum / self.window.len() as f64,
            lr,
            episode_best_action,
            episode_best_reward,
            best_so_far: self.log.best_reward,
            update,
        });
        self.episode += 1;
        Ok(self.log.episodes.last().expect("just pushed"))
    }

    /// Runs episodes until `max_episodes` or the reward target is reached.
    pub fn run(&mut self) -> Result<()> {
        while !self.done() {
            self.run_episode()?;
        }
        Ok(())
    }
}

/// Trains a fresh agent on `scenario`; reproducible from `config.seed`.
pub fn train(scenario: &Scenario, config: &PpoConfig) -> Result<TrainingLog> {
    let mut trainer = Trainer::new(scenario, config)?;
    trainer.run()?;
    Ok(trainer.into_parts().1)
}
