use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClippedSurrogate {
    /// `mean_t min(rho_t A_t, clip(rho_t, 1 - eps, 1 + eps) A_t)`.
    pub objective: f64,
    /// `exp(new - old)` per sample.
    pub ratios: Vec<f64>,
    /// `d objective / d new_log_prob_t`; zero where the clipped branch binds.
    pub grad_log_prob: Vec<f64>,
    /// Share of samples whose clipped branch binds.
    pub clip_fraction: f64,
}

pub fn clipped_objective(
    new_log_probs: &[f64],
    old_log_probs: &[f64],
    advantages: &[f64],
    eps: f64,
) -> Result<ClippedSurrogate> {
    let n = new_log_probs.len();
    if old_log_probs.len() != n || advantages.len() != n {
        return Err(Error::Dimension {
            context: "clipped objective inputs",
            expected: n,
            got: old_log_probs.len().min(advantages.len()),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("clipped objective needs samples"));
    }
    let inv_n = 1.0 / n as f64;
    let mut objective = 0.0;
    let mut clipped = 0usize;
    let mut ratios = Vec::with_capacity(n);
    let mut grad_log_prob = Vec::with_capacity(n);
    for ((new, old), &a) in new_log_probs.iter().zip(old_log_probs).zip(advantages) {
        let rho = (new - old).exp();
        let unclipped = rho * a;
        let bounded = rho.clamp(1.0 - eps, 1.0 + eps) * a;
        if unclipped <= bounded {
            objective += unclipped;
            grad_log_prob.push(inv_n * unclipped);
        } else {
            objective += bounded;
            grad_log_prob.push(0.0);
            clipped += 1;
        }
        ratios.push(rho);
    }
    Ok(ClippedSurrogate {
        objective: objective * inv_n,
        ratios,
        grad_log_prob,
        clip_fraction: clipped as f64 * inv_n,
    })
}
