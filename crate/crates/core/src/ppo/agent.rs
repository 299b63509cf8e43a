use ndarray::Array2;
use rand::Rng;

use super::clip::clipped_objective;
use super::config::{PolicyKind, PpoConfig};
use super::env::{Action, FeatureScale, MdpState, PlacementEnv};
use super::policy::{GaussianHeads, PolicyHeads};
use super::pool::ExperiencePool;
use super::returns::n_step_target;
use crate::error::{Error, Result};
use crate::nn::{Direction, Mlp};

/// Actor and critic networks plus the action-space description.
#[derive(Debug, Clone, PartialEq)]
pub struct PpoAgent {
    pub actor: Mlp,
    pub critic: Mlp,
    /// Per-AP log standard deviation (Gaussian policy only, else empty).
    pub log_std: Vec<f64>,
    kind: PolicyKind,
    num_aps: usize,
    num_positions: usize,
    span: f64,
    scale: FeatureScale,
    config: PpoConfig,
}

/// One mini-batch with everything computed under the old parameters.
#[derive(Debug, Clone)]
pub struct PreparedBatch {
    pub states: Array2<f64>,
    pub actions: Vec<Action>,
    pub old_log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateStats {
    pub lr: f64,
    /// `J^CLIP` in the first epoch (equal to the mean advantage).
    pub surrogate: f64,
    /// Critic mean squared error in the first epoch.
    pub critic_loss: f64,
    /// Mean joint policy entropy in the last epoch.
    pub entropy: f64,
    pub clip_fraction: f64,
}

impl PpoAgent {
    pub fn new(env: &PlacementEnv<'_>, config: &PpoConfig, rng: &mut impl Rng) -> Result<Self> {
        config.validate()?;
        let scenario = env.scenario();
        let num_aps = scenario.num_aps();
        let num_positions = scenario.num_positions();
        let span = scenario.config().rail_span();
        let (out_dim, scale, log_std) = match config.policy {
            PolicyKind::Categorical => (num_aps * num_positions, env.feature_scale(), Vec::new()),
            PolicyKind::Gaussian => (
                num_aps,
                env.continuous_feature_scale(),
                vec![(span / 4.0).ln(); num_aps],
            ),
        };
        let layers = |out: usize| {
            let mut sizes = vec![env.state_dim()];
            sizes.extend(&config.hidden_layers);
            sizes.push(out);
            sizes
        };
        let actor = Mlp::init(&layers(out_dim), rng.random())?;
        let critic = Mlp::init(&layers(1), rng.random())?;
        Ok(Self {
            actor,
            critic,
            log_std,
            kind: config.policy,
            num_aps,
            num_positions,
            span,
            scale,
            config: config.clone(),
        })
    }

    pub fn feature_scale(&self) -> &FeatureScale {
        &self.scale
    }

    pub fn config(&self) -> &PpoConfig {
        &self.config
    }

    /// Categorical heads for a state.
    pub fn heads(&self, state: &MdpState) -> Result<PolicyHeads> {
        let (logits, _) = self.actor.forward(&state.features(&self.scale))?;
        PolicyHeads::from_logits(&logits, self.num_aps, self.num_positions)
    }

    pub fn value(&self, state: &MdpState) -> Result<f64> {
        Ok(self.critic.forward(&state.features(&self.scale))?.0[0])
    }

    /// Samples an action; returns it with its joint log-probability.
    pub fn act(&self, state: &MdpState, rng: &mut impl Rng) -> Result<(Action, f64)> {
        let (out, _) = self.actor.forward(&state.features(&self.scale))?;
        match self.kind {
            PolicyKind::Categorical => {
                let heads = PolicyHeads::from_logits(&out, self.num_aps, self.num_positions)?;
                let (placement, lp) = heads.sample(rng);
                Ok((Action::Discrete(placement), lp))
            }
            PolicyKind::Gaussian => {
                let heads = GaussianHeads::new(&out, &self.log_std, self.span)?;
                let (x, lp) = heads.sample(rng);
                Ok((Action::Continuous(x), lp))
            }
        }
    }

    fn log_prob_row(&self, outputs: &[f64], action: &Action) -> Result<f64> {
        match (self.kind, action) {
            (PolicyKind::Categorical, Action::Discrete(p)) => {
                Ok(PolicyHeads::from_logits(outputs, self.num_aps, self.num_positions)?.log_prob(p))
            }
            (PolicyKind::Gaussian, Action::Continuous(x)) => {
                Ok(GaussianHeads::new(outputs, &self.log_std, self.span)?.log_prob(x))
            }
            _ => Err(Error::InvalidConfig("action kind does not match the policy".into())),
        }
    }

    fn features_matrix<'a>(&self, states: impl ExactSizeIterator<Item = &'a MdpState>) -> Array2<f64> {
        let mut out = Array2::zeros((states.len(), self.actor.input_dim()));
        for (row, s) in out.rows_mut().into_iter().zip(states) {
            row.into_slice()
                .expect("contiguous")
                .copy_from_slice(&s.features(&self.scale));
        }
        out
    }

    /// Gathers the sampled transitions and evaluates old log-probabilities,
    /// n-step targets and advantages with the current (old) parameters.
    pub fn prepare_batch(&self, pool: &ExperiencePool, indices: &[usize]) -> Result<PreparedBatch> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("mini-batch"));
        }
        let gamma = self.config.discount;
        let horizon = self.config.n_step + 1;
        let transitions: Vec<_> = indices
            .iter()
            .map(|&i| {
                pool.get(i).ok_or(Error::IndexOutOfRange {
                    what: "pool",
                    index: i,
                    len: pool.len(),
                })
            })
            .collect::<Result<_>>()?;
        let states = self.features_matrix(transitions.iter().map(|t| &t.state));
        let values = self.critic.predict(states.view())?.column(0).to_vec();

        // Reward windows and bootstrap states (dropped entirely when gamma = 0).
        let mut windows = Vec::with_capacity(indices.len());
        let mut bootstrap_idx = Vec::new();
        for &i in indices {
            let window = pool.episode_window(i, horizon + 1);
            let boot = (window.len() == horizon + 1 && gamma != 0.0).then(|| window[horizon]);
            let rewards: Vec<f64> = window
                .iter()
                .take(horizon)
                .map(|&j| pool.get(j).expect("in range").reward)
                .collect();
            if let Some(b) = boot {
                bootstrap_idx.push(b);
            }
            windows.push((rewards, boot.is_some()));
        }
        let boot_values = if bootstrap_idx.is_empty() {
            Vec::new()
        } else {
            let boot_states = self.features_matrix(
                bootstrap_idx.iter().map(|&j| &pool.get(j).expect("in range").state),
            );
            self.critic.predict(boot_states.view())?.column(0).to_vec()
        };
        let mut boot_iter = boot_values.into_iter();
        let targets: Vec<f64> = windows
            .iter()
            .map(|(rewards, has_boot)| {
                let boot = if *has_boot { boot_iter.next() } else { None };
                n_step_target(rewards, boot, gamma)
            })
            .collect();
        let mut advantages: Vec<f64> = targets.iter().zip(&values).map(|(t, v)| t - v).collect();
        if self.config.normalize_advantages && advantages.len() > 1 {
            let n = advantages.len() as f64;
            let mean = advantages.iter().sum::<f64>() / n;
            let std = (advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
            advantages.iter_mut().for_each(|a| *a = (*a - mean) / (std + 1e-8));
        }

        let outputs = self.actor.predict(states.view())?;
        let actions: Vec<Action> = transitions.iter().map(|t| t.action.clone()).collect();
        let old_log_probs = outputs
            .rows()
            .into_iter()
            .zip(&actions)
            .map(|(row, a)| self.log_prob_row(row.as_slice().expect("contiguous"), a))
            .collect::<Result<_>>()?;
        Ok(PreparedBatch {
            states,
            actions,
            old_log_probs,
            advantages,
            targets,
        })
    }

    /// One gradient-ascent step on `J^CLIP + c_ent * mean entropy`.
    /// Returns `(J^CLIP, mean entropy, clip fraction)` before the step.
    pub fn actor_epoch(&mut self, batch: &PreparedBatch, lr: f64) -> Result<(f64, f64, f64)> {
        let (outputs, cache) = self.actor.forward_batch(batch.states.view())?;
        let rows: Vec<&[f64]> = outputs
            .rows()
            .into_iter()
            .map(|r| r.to_slice().expect("contiguous"))
            .collect();
        let mut new_log_probs = Vec::with_capacity(rows.len());
        for (row, action) in rows.iter().zip(&batch.actions) {
            new_log_probs.push(self.log_prob_row(row, action)?);
        }
        let surrogate = clipped_objective(
            &new_log_probs,
            &batch.old_log_probs,
            &batch.advantages,
            self.config.clip,
        )?;
        let w_ent = self.config.entropy_coef / rows.len() as f64;
        let mut out_grad = Array2::zeros(outputs.dim());
        let mut log_std_grad = vec![0.0; self.log_std.len()];
        let mut scratch = vec![0.0; self.log_std.len()];
        let mut entropy = 0.0;
        for (b, (row, action)) in rows.iter().zip(&batch.actions).enumerate() {
            let grad_row = out_grad.row_mut(b).into_slice().expect("contiguous");
            let w_lp = surrogate.grad_log_prob[b];
            match action {
                Action::Discrete(p) => {
                    let heads = PolicyHeads::from_logits(row, self.num_aps, self.num_positions)?;
                    entropy += heads.entropy();
                    heads.logit_gradient(p, w_lp, w_ent, grad_row);
                }
                Action::Continuous(x) => {
                    let heads = GaussianHeads::new(row, &self.log_std, self.span)?;
                    entropy += heads.entropy();
                    heads.gradient(x, w_lp, w_ent, grad_row, &mut scratch);
                    log_std_grad.iter_mut().zip(&scratch).for_each(|(g, s)| *g += s);
                }
            }
        }
        let grads = self.actor.backward(&cache, out_grad.view())?;
        self.actor.sgd_step(&grads, lr, Direction::Ascend)?;
        for (ls, g) in self.log_std.iter_mut().zip(&log_std_grad) {
            *ls += lr * g;
        }
        Ok((
            surrogate.objective,
            entropy / rows.len() as f64,
            surrogate.clip_fraction,
        ))
    }

    /// One gradient-descent step on `mean (V(s) - V_tar)^2`; returns the loss before the step.
    pub fn critic_epoch(&mut self, batch: &PreparedBatch, lr: f64) -> Result<f64> {
        let (values, cache) = self.critic.forward_batch(batch.states.view())?;
        let n = batch.targets.len() as f64;
        let mut grad = Array2::zeros(values.dim());
        let mut loss = 0.0;
        for ((g, v), target) in grad.iter_mut().zip(values.iter()).zip(&batch.targets) {
            let err = v - target;
            loss += err * err;
            *g = 2.0 * err / n;
        }
        let grads = self.critic.backward(&cache, grad.view())?;
        self.critic.sgd_step(&grads, lr, Direction::Descend)?;
        Ok(loss / n)
    }

    /// Samples a mini-batch and runs `epochs_per_update` actor and critic steps.
    pub fn update(&mut self, pool: &ExperiencePool, lr: f64, rng: &mut impl Rng) -> Result<UpdateStats> {
        let need = self.config.schedule.batch_size;
        if pool.len() < need {
            return Err(Error::InsufficientPool {
                have: pool.len(),
                need,
            });
        }
        let indices = pool.sample_indices(rng, need);
        let batch = self.prepare_batch(pool, &indices)?;
        let mut stats = UpdateStats {
            lr,
            surrogate: 0.0,
            critic_loss: 0.0,
            entropy: 0.0,
            clip_fraction: 0.0,
        };
        for epoch in 0..self.config.epochs_per_update {
            let (surrogate, entropy, clip_fraction) = self.actor_epoch(&batch, lr)?;
            let critic_loss = self.critic_epoch(&batch, lr)?;
            if epoch == 0 {
                stats.surrogate = surrogate;
                stats.critic_loss = critic_loss;
            }
            stats.entropy = entropy;
            stats.clip_fraction = clip_fraction;
        }
        Ok(stats)
    }
}
