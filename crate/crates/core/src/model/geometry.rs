use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::scenario::{Layout, ScenarioConfig};

/// AP and TA abscissae with the derived link distances and AoA cosines.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub ap_x: Vec<f64>,
    pub ta_x: Vec<f64>,
    /// Straight-line distance, indexed `[[k, l]]`, meters.
    pub dist: Array2<f64>,
    /// `|x_l - x_k| / d_kl`, indexed `[[k, l]]`.
    pub cos_aoa: Array2<f64>,
}

pub fn build_geometry(config: &ScenarioConfig) -> Result<Geometry> {
    config.validate()?;
    let (ap_x, ta_x) = match config.layout {
        Layout::Midpoint => {
            let ap_pitch = config.railway_length / config.num_aps as f64;
            let ta_pitch = config.train_length / config.num_tas as f64;
            let ap_x = (1..=config.num_aps)
                .map(|l| (l as f64 - 0.5) * ap_pitch)
                .collect();
            let ta_x = (1..=config.num_tas)
                .map(|k| config.train_offset + (k as f64 - 0.5) * ta_pitch)
                .collect();
            (ap_x, ta_x)
        }
        Layout::RandomUniform { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ap_x: Vec<f64> = (0..config.num_aps)
                .map(|_| rng.random::<f64>() * config.railway_length)
                .collect();
            let mut ta_x: Vec<f64> = (0..config.num_tas)
                .map(|_| config.train_offset + rng.random::<f64>() * config.train_length)
                .collect();
            ap_x.sort_by(f64::total_cmp);
            ta_x.sort_by(f64::total_cmp);
            (ap_x, ta_x)
        }
    };
    Ok(geometry_from_coordinates(ap_x, ta_x, config.vertical_distance))
}

/// Fills distances and AoA cosines for explicit coordinates.
pub(crate) fn geometry_from_coordinates(
    ap_x: Vec<f64>,
    ta_x: Vec<f64>,
    vertical_distance: f64,
) -> Geometry {
    let (k, l) = (ta_x.len(), ap_x.len());
    let mut dist = Array2::zeros((k, l));
    let mut cos_aoa = Array2::zeros((k, l));
    for (ki, &xk) in ta_x.iter().enumerate() {
        for (li, &xl) in ap_x.iter().enumerate() {
            let horizontal = (xl - xk).abs();
            let d = horizontal.hypot(vertical_distance);
            dist[[ki, li]] = d;
            cos_aoa[[ki, li]] = horizontal / d;
        }
    }
    Geometry {
        ap_x,
        ta_x,
        dist,
        cos_aoa,
    }
}

impl Geometry {
    pub fn num_aps(&self) -> usize {
        self.ap_x.len()
    }

    pub fn num_tas(&self) -> usize {
        self.ta_x.len()
    }
}
