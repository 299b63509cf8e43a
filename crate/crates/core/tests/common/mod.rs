#![allow(dead_code)]

use movcf::ScenarioConfig;
use num_complex::Complex64;
use rand::Rng;

/// Per-TA SINR written out term by term from the raw configuration, sharing
/// no code with the crate: midpoint geometry, kilometre path loss and the
/// interference exponent taken at the interferer's angle.
pub fn literal_sinr(cfg: &ScenarioConfig, positions: &[usize], doppler: bool) -> Vec<f64> {
    let (l_n, k_n) = (cfg.num_aps, cfg.num_tas);
    let lambda = 3.0e8 / cfg.carrier_freq;
    let kappa = 2.0 * std::f64::consts::PI / lambda;
    let w = if doppler {
        cfg.carrier_freq * cfg.train_speed * cfg.sample_duration / 3.0e8
    } else {
        0.0
    };
    let ap = |l: usize| (l as f64 + 0.5) * cfg.railway_length / l_n as f64;
    let ta = |k: usize| cfg.train_offset + (k as f64 + 0.5) * cfg.train_length / k_n as f64;
    let d = |k: usize, l: usize| ((ta(k) - ap(l)).powi(2) + cfg.vertical_distance.powi(2)).sqrt();
    let cos = |k: usize, l: usize| (ta(k) - ap(l)).abs() / d(k, l);
    let beta = |k: usize, l: usize| cfg.pathloss_ref * (d(k, l) / 1000.0).powf(-cfg.pathloss_exp);
    let phase = |k: usize, l: usize| {
        Complex64::from_polar(1.0, kappa * cos(k, l) * (w + positions[l] as f64 * cfg.position_step))
    };

    (0..k_n)
        .map(|k| {
            let ds: Complex64 = (0..l_n)
                .map(|l| cfg.uplink_powers[k].sqrt() * beta(k, l) * phase(k, l))
                .sum();
            let interference: f64 = (0..k_n)
                .filter(|&i| i != k)
                .map(|i| {
                    (0..l_n)
                        .map(|l| {
                            let eta = Complex64::from_polar(1.0, kappa * (d(i, l) - d(k, l)));
                            cfg.uplink_powers[i].sqrt()
                                * (beta(k, l) * beta(i, l)).sqrt()
                                * eta
                                * phase(i, l)
                        })
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum();
            let noise = cfg.noise_power * (0..l_n).map(|l| beta(k, l)).sum::<f64>();
            ds.norm_sqr() / (interference + noise)
        })
        .collect()
}

pub fn literal_sum_se(cfg: &ScenarioConfig, positions: &[usize], doppler: bool) -> f64 {
    literal_sinr(cfg, positions, doppler)
        .iter()
        .map(|s| (1.0 + s).log2())
        .sum()
}

/// A valid midpoint-layout scenario with `L <= 8`, `K <= 4`, `N <= 6`.
pub fn random_config(rng: &mut impl Rng) -> ScenarioConfig {
    let num_tas = rng.random_range(1..=4);
    let railway_length = rng.random_range(200.0..2000.0);
    let train_length = rng.random_range(20.0..railway_length * 0.5);
    ScenarioConfig {
        num_aps: rng.random_range(1..=8),
        num_tas,
        num_positions: rng.random_range(1..=6),
        position_step: rng.random_range(0.01..0.5),
        vertical_distance: rng.random_range(5.0..150.0),
        railway_length,
        train_length,
        train_offset: rng.random_range(0.0..railway_length - train_length),
        carrier_freq: rng.random_range(0.5e9..6e9),
        sample_duration: rng.random_range(1e-5..1e-3),
        train_speed: rng.random_range(0.0..120.0),
        noise_power: 10f64.powf(rng.random_range(-17.0..-11.0)),
        uplink_powers: (0..num_tas).map(|_| rng.random_range(0.01..1.0)).collect(),
        pathloss_ref: 1e-12,
        pathloss_exp: rng.random_range(2.0..4.0),
        ..ScenarioConfig::default()
    }
}

pub fn random_positions(rng: &mut impl Rng, num_aps: usize, num_positions: usize) -> Vec<usize> {
    (0..num_aps).map(|_| rng.random_range(1..=num_positions)).collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// The 4-AP, 3-TA, 4-position scenario used for PPO checks.
pub fn tiny_config() -> ScenarioConfig {
    ScenarioConfig {
        num_aps: 4,
        num_positions: 4,
        ..ScenarioConfig::default()
    }
    .with_num_tas(3)
}

/// Largest relative gap between the analytic gradient of
/// `sum(weights * net(inputs))` and its central difference with step `h`,
/// over the parameter indices `indices`. Gradients smaller than `1e-6` are
/// compared on an absolute scale of `1e-6`.
pub fn gradient_gap(
    net: &movcf::nn::Mlp,
    inputs: &ndarray::Array2<f64>,
    weights: &ndarray::Array2<f64>,
    indices: &[usize],
    h: f64,
) -> f64 {
    let (_, cache) = net.forward_batch(inputs.view()).unwrap();
    let analytic = net.backward(&cache, weights.view()).unwrap();
    let loss = |n: &movcf::nn::Mlp| (n.predict(inputs.view()).unwrap() * weights).sum();
    let mut probe = net.clone();
    indices
        .iter()
        .map(|&idx| {
            let theta = net.parameter(idx);
            probe.set_parameter(idx, theta + h);
            let up = loss(&probe);
            probe.set_parameter(idx, theta - h);
            let down = loss(&probe);
            probe.set_parameter(idx, theta);
            let numeric = (up - down) / (2.0 * h);
            let a = analytic.get(idx);
            (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6)
        })
        .fold(0.0, f64::max)
}

/// CSV text with the trailing `wall_ms` column removed from every line.
pub fn without_wall_clock(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|line| line.rsplit_once(',').map_or(line, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}
