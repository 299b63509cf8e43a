//! Physical and system constants describing one railway snapshot.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const LIGHT_SPEED: f64 = 3.0e8;

/// Converts a power level in dBm to watts.
pub fn noise_power_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

/// Converts km/h to m/s.
pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

/// Converts m/s to km/h.
pub fn mps_to_kmh(mps: f64) -> f64 {
    mps * 3.6
}

/// How AP and TA abscissae are laid out along the track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Equispaced midpoints: AP `l` at `(l - 0.5) * railway / L`, TA `k` at
    /// `offset + (k - 0.5) * train / K`.
    Midpoint,
    /// Independent uniform draws on the railway (APs) and the train (TAs),
    /// sorted ascending.
    RandomUniform { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_aps: usize,
    pub num_tas: usize,
    pub num_positions: usize,
    /// Minimum antenna displacement `d_s`, meters.
    pub position_step: f64,
    /// AP-to-track perpendicular distance `d_ve`, meters.
    pub vertical_distance: f64,
    pub railway_length: f64,
    pub train_length: f64,
    /// Abscissa of the rear of the train, meters.
    pub train_offset: f64,
    pub carrier_freq: f64,
    /// Signal sampling duration `T`, seconds.
    pub sample_duration: f64,
    /// Train speed, m/s.
    pub train_speed: f64,
    /// Receiver noise power, watts.
    pub noise_power: f64,
    /// Uplink transmit power per TA, watts.
    pub uplink_powers: Vec<f64>,
    /// Path-loss reference gain at 1 km.
    pub pathloss_ref: f64,
    pub pathloss_exp: f64,
    /// Signal bandwidth, Hz. Carried as metadata only.
    pub bandwidth: f64,
    pub layout: Layout,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let carrier_freq = 1.2e9;
        let num_tas = 8;
        let railway_length = 1000.0;
        let train_length = 300.0;
        Self {
            num_aps: 30,
            num_tas,
            num_positions: 10,
            position_step: LIGHT_SPEED / carrier_freq / 2.0,
            vertical_distance: 50.0,
            railway_length,
            train_length,
            train_offset: (railway_length - train_length) / 2.0,
            carrier_freq,
            sample_duration: 0.4e-3,
            train_speed: kmh_to_mps(300.0),
            noise_power: noise_power_watts(-96.0),
            uplink_powers: vec![0.1; num_tas],
            pathloss_ref: 1e-12,
            pathloss_exp: 3.0,
            bandwidth: 20e6,
            layout: Layout::Midpoint,
        }
    }
}

impl ScenarioConfig {
    pub fn wavelength(&self) -> f64 {
        LIGHT_SPEED / self.carrier_freq
    }

    /// Rail length available to each movable antenna, `N * d_s`.
    pub fn rail_span(&self) -> f64 {
        self.num_positions as f64 * self.position_step
    }

    /// Normalized Doppler displacement `w = f v T / c`, meters.
    pub fn doppler_displacement(&self) -> f64 {
        self.carrier_freq * self.train_speed * self.sample_duration / LIGHT_SPEED
    }

    /// Sets `K` and resizes the power vector, repeating the first entry.
    pub fn with_num_tas(mut self, num_tas: usize) -> Self {
        let p = self.uplink_powers.first().copied().unwrap_or(0.1);
        self.num_tas = num_tas;
        self.uplink_powers = vec![p; num_tas];
        self
    }

    /// Sets the same uplink power for every TA.
    pub fn with_uniform_power(mut self, watts: f64) -> Self {
        self.uplink_powers = vec![watts; self.num_tas];
        self
    }

    /// Checks every invariant, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_aps == 0 {
            return fail("num_aps must be positive".into());
        }
        if self.num_tas == 0 {
            return fail("num_tas must be positive".into());
        }
        if self.num_positions == 0 {
            return fail("num_positions must be positive".into());
        }
        let positive = [
            ("position_step_m", self.position_step),
            ("vertical_distance_m", self.vertical_distance),
            ("railway_length_m", self.railway_length),
            ("train_length_m", self.train_length),
            ("carrier_freq_hz", self.carrier_freq),
            ("sample_duration_s", self.sample_duration),
            ("noise_power_w", self.noise_power),
            ("pathloss_ref", self.pathloss_ref),
            ("pathloss_exp", self.pathloss_exp),
            ("bandwidth_hz", self.bandwidth),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return fail(format!("{name} must be finite and > 0 (got {value})"));
            }
        }
        if !(self.train_speed.is_finite() && self.train_speed >= 0.0) {
            return fail(format!("train_speed_mps must be >= 0 (got {})", self.train_speed));
        }
        if !(self.train_offset.is_finite() && self.train_offset >= 0.0) {
            return fail(format!("train_offset_m must be >= 0 (got {})", self.train_offset));
        }
        if self.train_offset + self.train_length > self.railway_length {
            return fail(format!(
                "train_offset_m + train_length_m ({}) exceeds railway_length_m ({})",
                self.train_offset + self.train_length,
                self.railway_length
            ));
        }
        if self.uplink_powers.len() != self.num_tas {
            return fail(format!(
                "uplink_power_w has {} entries but num_tas is {}",
                self.uplink_powers.len(),
                self.num_tas
            ));
        }
        if let Some(p) = self.uplink_powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return fail(format!("uplink_power_w entries must be >= 0 (got {p})"));
        }
        Ok(())
    }
}
