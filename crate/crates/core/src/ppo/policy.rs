use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::placement::Placement;

/// `L` independent categorical heads over `N` positions, stored as log-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyHeads {
    num_heads: usize,
    num_choices: usize,
    log_probs: Vec<f64>,
}

impl PolicyHeads {
    /// Row-major logits, head `l` occupying `[l * N, (l + 1) * N)`.
    pub fn from_logits(logits: &[f64], num_heads: usize, num_choices: usize) -> Result<Self> {
        if logits.len() != num_heads * num_choices || num_choices == 0 {
            return Err(Error::Dimension {
                context: "policy logits",
                expected: num_heads * num_choices,
                got: logits.len(),
            });
        }
        let mut log_probs = Vec::with_capacity(logits.len());
        for head in logits.chunks_exact(num_choices) {
            let max = head.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_norm = head.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
            log_probs.extend(head.iter().map(|z| z - max - log_norm));
        }
        Ok(Self {
            num_heads,
            num_choices,
            log_probs,
        })
    }

    pub fn num_heads(&self) -> usize {
        self.num_heads
    }

    pub fn num_choices(&self) -> usize {
        self.num_choices
    }

    pub fn log_probabilities(&self, head: usize) -> &[f64] {
        &self.log_probs[head * self.num_choices..(head + 1) * self.num_choices]
    }

    pub fn probabilities(&self, head: usize) -> Vec<f64> {
        self.log_probabilities(head).iter().map(|lp| lp.exp()).collect()
    }

    /// Joint log-probability of a 1-based placement.
    pub fn log_prob(&self, action: &Placement) -> f64 {
        action
            .positions()
            .iter()
            .enumerate()
            .map(|(l, &n)| self.log_probs[l * self.num_choices + n - 1])
            .sum()
    }

    /// Sum of the per-head entropies.
    pub fn entropy(&self) -> f64 {
        -self.log_probs.iter().map(|lp| lp.exp() * lp).sum::<f64>()
    }

    /// Writes `d/dz [w_lp * log pi(a) + w_ent * H]` into `out` (one entry per logit).
    pub fn logit_gradient(&self, action: &Placement, w_lp: f64, w_ent: f64, out: &mut [f64]) {
        let n = self.num_choices;
        for l in 0..self.num_heads {
            let lps = self.log_probabilities(l);
            let head_entropy: f64 = -lps.iter().map(|lp| lp.exp() * lp).sum::<f64>();
            let chosen = action.positions()[l] - 1;
            for (j, &lp) in lps.iter().enumerate() {
                let p = lp.exp();
                let indicator = if j == chosen { 1.0 } else { 0.0 };
                out[l * n + j] = w_lp * (indicator - p) - w_ent * p * (lp + head_entropy);
            }
        }
    }

    /// Draws every head independently.
    pub fn sample(&self, rng: &mut impl Rng) -> (Placement, f64) {
        let mut positions = Vec::with_capacity(self.num_heads);
        let mut joint = 0.0;
        for l in 0..self.num_heads {
            let lps = self.log_probabilities(l);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = lps.len() - 1;
            for (j, lp) in lps.iter().enumerate() {
                acc += lp.exp();
                if u < acc {
                    pick = j;
                    break;
                }
            }
            joint += lps[pick];
            positions.push(pick + 1);
        }
        (
            Placement::new(positions, self.num_choices).expect("sampled in range"),
            joint,
        )
    }
}

/// Samples a placement and its joint log-probability.
pub fn sample_action(heads: &PolicyHeads, rng: &mut impl Rng) -> (Placement, f64) {
    heads.sample(rng)
}

/// Independent Gaussians with means `span * (tanh(z) + 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianHeads {
    pub means: Vec<f64>,
    pub log_std: Vec<f64>,
    /// `d mean / d z` per head.
    mean_slope: Vec<f64>,
}

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

impl GaussianHeads {
    pub fn new(outputs: &[f64], log_std: &[f64], span: f64) -> Result<Self> {
        if outputs.len() != log_std.len() {
            return Err(Error::Dimension {
                context: "gaussian heads",
                expected: log_std.len(),
                got: outputs.len(),
            });
        }
        let (means, mean_slope) = outputs
            .iter()
            .map(|z| {
                let t = z.tanh();
                (0.5 * span * (t + 1.0), 0.5 * span * (1.0 - t * t))
            })
            .unzip();
        Ok(Self {
            means,
            log_std: log_std.to_vec(),
            mean_slope,
        })
    }

    pub fn log_prob(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.means)
            .zip(&self.log_std)
            .map(|((x, mu), ls)| {
                let zscore = (x - mu) / ls.exp();
                -0.5 * zscore * zscore - ls - HALF_LN_TWO_PI
            })
            .sum()
    }

    pub fn entropy(&self) -> f64 {
        self.log_std.iter().map(|ls| ls + 0.5 + HALF_LN_TWO_PI).sum()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> (Vec<f64>, f64) {
        let x: Vec<f64> = self
            .means
            .iter()
            .zip(&self.log_std)
            .map(|(mu, ls)| mu + ls.exp() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let lp = self.log_prob(&x);
        (x, lp)
    }

    /// Gradients of `w_lp * log pi(x) + w_ent * H` with respect to the raw
    /// network outputs (`out_z`) and the log-std parameters (`out_log_std`).
    pub fn gradient(&self, x: &[f64], w_lp: f64, w_ent: f64, out_z: &mut [f64], out_log_std: &mut [f64]) {
        for l in 0..self.means.len() {
            let inv_var = (-2.0 * self.log_std[l]).exp();
            let diff = x[l] - self.means[l];
            out_z[l] = w_lp * diff * inv_var * self.mean_slope[l];
            out_log_std[l] = w_lp * (diff * diff * inv_var - 1.0) + w_ent;
        }
    }
}
