use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;

use super::env::{Action, MdpState};

/// Memory size of the experience pool.
pub const DEFAULT_POOL_CAPACITY: usize = 40_960;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: MdpState,
    pub action: Action,
    pub reward: f64,
    pub next_state: MdpState,
    /// Log-probability of `action` under the policy that sampled it.
    pub joint_log_prob: f64,
    /// Critic estimate of `state` when the transition was collected.
    pub value_estimate: f64,
    pub episode: u64,
    pub step: usize,
}

/// Fixed-capacity FIFO of transitions; the oldest entry is evicted first.
#[derive(Debug, Clone)]
pub struct ExperiencePool {
    capacity: usize,
    items: VecDeque<Transition>,
}

impl ExperiencePool {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "pool capacity must be positive");
        Self {
            capacity,
            items: VecDeque::with_capacity(capacity.min(DEFAULT_POOL_CAPACITY)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, transition: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(transition);
    }

    pub fn get(&self, idx: usize) -> Option<&Transition> {
        self.items.get(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `count` distinct indices drawn uniformly.
    pub fn sample_indices(&self, rng: &mut impl Rng, count: usize) -> Vec<usize> {
        index::sample(rng, self.items.len(), count.min(self.items.len())).into_vec()
    }

    /// Indices of `idx` and up to `horizon - 1` later transitions of the same episode.
    pub fn episode_window(&self, idx: usize, horizon: usize) -> Vec<usize> {
        let episode = self.items[idx].episode;
        (idx..self.items.len())
            .take(horizon)
            .take_while(|&j| self.items[j].episode == episode)
            .collect()
    }
}
