use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use super::Geometry;
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Which channel the combiner sees when forming the SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// `g_kl`: the LoS channel with the Doppler displacement `w cos(theta_kl)`.
    Doppler,
    /// `h_kl`: the plain LoS channel, no Doppler term.
    LineOfSight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Large-scale gain `beta_kl`, indexed `[[k, l]]`.
    pub beta: Array2<f64>,
    /// LoS channel `h_kl = sqrt(beta_kl) exp(j 2 pi d_kl / lambda)`.
    pub h: Array2<Complex64>,
    /// Normalized Doppler displacement `w = f v T / c`, meters.
    pub w_dfo: f64,
    pub wavelength: f64,
}

/// Path loss uses kilometers (`beta0` is referenced to 1 km); phases use meters.
pub fn build_channels(config: &ScenarioConfig, geom: &Geometry) -> Result<ChannelSet> {
    let (k, l) = geom.dist.dim();
    if k != config.num_tas || l != config.num_aps {
        return Err(Error::Dimension {
            context: "geometry vs scenario",
            expected: config.num_tas * config.num_aps,
            got: k * l,
        });
    }
    let wavelength = config.wavelength();
    let wavenumber = 2.0 * PI / wavelength;
    let beta = geom
        .dist
        .mapv(|d| config.pathloss_ref * (d / 1000.0).powf(-config.pathloss_exp));
    let mut h = Array2::zeros((k, l));
    for ((idx, d), b) in geom.dist.indexed_iter().zip(beta.iter()) {
        h[idx] = Complex64::from_polar(b.sqrt(), wavenumber * d);
    }
    Ok(ChannelSet {
        beta,
        h,
        w_dfo: config.doppler_displacement(),
        wavelength,
    })
}

impl ChannelSet {
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Doppler channel `g_kl = sqrt(beta_kl) exp(j 2 pi / lambda (d_kl + w cos theta_kl))`.
    pub fn doppler_channel(&self, geom: &Geometry, k: usize, l: usize) -> Complex64 {
        let phase = self.wavenumber() * (geom.dist[[k, l]] + self.w_dfo * geom.cos_aoa[[k, l]]);
        Complex64::from_polar(self.beta[[k, l]].sqrt(), phase)
    }

    /// The displacement added to `n_l d_s` inside the movement phase.
    pub fn displacement(&self, kind: ChannelKind) -> Option<f64> {
        match kind {
            ChannelKind::Doppler => Some(self.w_dfo),
            ChannelKind::LineOfSight => None,
        }
    }
}
