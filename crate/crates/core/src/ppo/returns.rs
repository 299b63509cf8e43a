use ndarray::Array2;

use super::env::FeatureScale;
use super::pool::Transition;
use crate::error::{Error, Result};
use crate::nn::Mlp;

/// `sum_j gamma^j r_j + gamma^len(rewards) * V`, the bootstrap dropped when
/// the window reaches the end of its episode.
pub fn n_step_target(rewards: &[f64], bootstrap: Option<f64>, gamma: f64) -> f64 {
    let mut discount = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    match bootstrap {
        Some(v) => total + discount * v,
        None => total,
    }
}

/// Critic values of every state in an episode.
fn state_values(episode: &[Transition], critic: &Mlp, scale: &FeatureScale) -> Result<Vec<f64>> {
    let dim = critic.input_dim();
    let mut inputs = Array2::zeros((episode.len(), dim));
    for (row, t) in inputs.rows_mut().into_iter().zip(episode) {
        let features = t.state.features(scale);
        if features.len() != dim {
            return Err(Error::Dimension {
                context: "critic input",
                expected: dim,
                got: features.len(),
            });
        }
        row.into_slice().expect("contiguous").copy_from_slice(&features);
    }
    Ok(critic.predict(inputs.view())?.column(0).to_vec())
}

/// Targets for an ordered episode: rewards `r_t .. r_{t+n}` plus
/// `gamma^(n+1) V(s_{t+n+1})` while `s_{t+n+1}` lies inside the episode.
fn episode_targets(episode: &[Transition], values: &[f64], gamma: f64, n_step: usize) -> Vec<f64> {
    let rewards: Vec<f64> = episode.iter().map(|t| t.reward).collect();
    (0..episode.len())
        .map(|t| {
            let end = (t + n_step + 1).min(episode.len());
            let bootstrap = values.get(t + n_step + 1).copied();
            n_step_target(&rewards[t..end], bootstrap, gamma)
        })
        .collect()
}

/// `V_tar(s_t)` for each transition of one ordered episode.
pub fn target_value(
    episode: &[Transition],
    critic_old: &Mlp,
    scale: &FeatureScale,
    gamma: f64,
    n_step: usize,
) -> Result<Vec<f64>> {
    if episode.is_empty() {
        return Err(Error::EmptyInput("target_value needs at least one transition"));
    }
    let values = state_values(episode, critic_old, scale)?;
    Ok(episode_targets(episode, &values, gamma, n_step))
}

/// `A_t = V_tar(s_t) - V(s_t)` for each transition of one ordered episode.
pub fn advantage(
    episode: &[Transition],
    critic_old: &Mlp,
    scale: &FeatureScale,
    gamma: f64,
    n_step: usize,
) -> Result<Vec<f64>> {
    if episode.is_empty() {
        return Err(Error::EmptyInput("advantage needs at least one transition"));
    }
    let values = state_values(episode, critic_old, scale)?;
    Ok(episode_targets(episode, &values, gamma, n_step)
        .into_iter()
        .zip(values)
        .map(|(target, v)| target - v)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_discount_is_reward() {
        assert_eq!(n_step_target(&[2.5, 9.0, 7.0], Some(100.0), 0.0), 2.5);
    }

    #[test]
    fn hand_computed_three_step_episode() {
        // n_step = 1: two rewards then gamma^2 V(s_{t+2}).
        let values = [10.0, 20.0, 30.0];
        let rewards = [1.0, 2.0, 3.0];
        let targets: Vec<f64> = (0..3)
            .map(|t| {
                let end = (t + 2).min(3);
                let boot = (t + 2 < 3).then(|| values[t + 2]);
                n_step_target(&rewards[t..end], boot, 0.9)
            })
            .collect();
        let expected = [1.0 + 0.9 * 2.0 + 0.81 * 30.0, 2.0 + 0.9 * 3.0, 3.0];
        for (a, b) in targets.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_step_episode_has_no_bootstrap() {
        assert_eq!(n_step_target(&[4.0], None, 0.5), 4.0);
    }
}
