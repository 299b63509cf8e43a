use ndarray::Array2;
use num_complex::Complex64;

use super::{build_channels, build_geometry, ChannelKind, ChannelSet, Geometry};
use crate::error::{Error, Result};
use crate::placement::Placement;
use crate::scenario::ScenarioConfig;

impl std::fmt::Display for SeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ta,ds_power_w,interference_w,noise_w,sinr,se_bps_hz")?;
        for k in 0..self.se.len() {
            writeln!(
                f,
                "{k},{:e},{:e},{:e},{:e},{:e}",
                self.ds_power[k],
                self.ui_power.row(k).sum(),
                self.noise_term[k],
                self.sinr[k],
                self.se[k]
            )?;
        }
        write!(f, "sum_se_bps_hz,{:e}", self.sum_se)
    }
}

/// The desired-signal coefficient of TA `k` after central combining and the
/// interference coefficient contributed by every other TA.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedTerms {
    pub ds: Complex64,
    /// `(i, UI_i)` for every `i != k`, ascending in `i`.
    pub ui: Vec<(usize, Complex64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeReport {
    /// `|DS_k|^2` per TA, watts.
    pub ds_power: Vec<f64>,
    /// `|UI_i|^2` seen at combiner `k`, indexed `[[k, i]]`; the diagonal is zero.
    pub ui_power: Array2<f64>,
    /// `sigma^2 * sum_l beta_kl` per TA.
    pub noise_term: Vec<f64>,
    pub sinr: Vec<f64>,
    /// `log2(1 + sinr)` per TA, bit/s/Hz.
    pub se: Vec<f64>,
    pub sum_se: f64,
}

/// Per-scenario constants shared by every placement evaluation.
#[derive(Debug, Clone)]
struct Tables {
    num_aps: usize,
    num_tas: usize,
    wavenumber: f64,
    w_dfo: f64,
    sqrt_p: Vec<f64>,
    beta: Array2<f64>,
    cos_aoa: Array2<f64>,
    /// `h*_kl h_il = sqrt(beta_kl beta_il) eta(d_il, d_kl)`, flattened `[k][i][l]`.
    cross: Vec<Complex64>,
    noise_term: Vec<f64>,
}

impl Tables {
    fn new(config: &ScenarioConfig, geom: &Geometry, ch: &ChannelSet) -> Result<Self> {
        let (num_tas, num_aps) = ch.beta.dim();
        if geom.dist.dim() != (num_tas, num_aps) {
            return Err(Error::Dimension {
                context: "geometry vs channels",
                expected: num_tas * num_aps,
                got: geom.dist.len(),
            });
        }
        if config.uplink_powers.len() != num_tas {
            return Err(Error::Dimension {
                context: "uplink powers",
                expected: num_tas,
                got: config.uplink_powers.len(),
            });
        }
        let wavenumber = ch.wavenumber();
        let mut cross = Vec::with_capacity(num_tas * num_tas * num_aps);
        for k in 0..num_tas {
            for i in 0..num_tas {
                for l in 0..num_aps {
                    let amplitude = (ch.beta[[k, l]] * ch.beta[[i, l]]).sqrt();
                    let eta = wavenumber * (geom.dist[[i, l]] - geom.dist[[k, l]]);
                    cross.push(Complex64::from_polar(amplitude, eta));
                }
            }
        }
        let noise_term = ch
            .beta
            .rows()
            .into_iter()
            .map(|row| config.noise_power * row.sum())
            .collect();
        Ok(Self {
            num_aps,
            num_tas,
            wavenumber,
            w_dfo: ch.w_dfo,
            sqrt_p: config.uplink_powers.iter().map(|p| p.sqrt()).collect(),
            beta: ch.beta.clone(),
            cos_aoa: geom.cos_aoa.clone(),
            cross,
            noise_term,
        })
    }

    /// `exp(j 2 pi / lambda cos(theta_il) (w + offset_l))`, flattened `[i][l]`.
    fn movement_phases(&self, offsets: &[f64], kind: ChannelKind) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.num_tas * self.num_aps);
        for i in 0..self.num_tas {
            for (l, &offset) in offsets.iter().enumerate() {
                let displacement = match kind {
                    ChannelKind::Doppler => self.w_dfo + offset,
                    ChannelKind::LineOfSight => offset,
                };
                out.push(Complex64::cis(
                    self.wavenumber * self.cos_aoa[[i, l]] * displacement,
                ));
            }
        }
        out
    }

    fn terms(&self, phases: &[Complex64], k: usize) -> CombinedTerms {
        let l_count = self.num_aps;
        let ds = (0..l_count)
            .map(|l| self.sqrt_p[k] * self.beta[[k, l]] * phases[k * l_count + l])
            .sum();
        let ui = (0..self.num_tas)
            .filter(|&i| i != k)
            .map(|i| {
                let base = (k * self.num_tas + i) * l_count;
                let sum: Complex64 = (0..l_count)
                    .map(|l| self.sqrt_p[i] * self.cross[base + l] * phases[i * l_count + l])
                    .sum();
                (i, sum)
            })
            .collect();
        CombinedTerms { ds, ui }
    }

    fn report(&self, offsets: &[f64], kind: ChannelKind) -> SeReport {
        let phases = self.movement_phases(offsets, kind);
        let k_count = self.num_tas;
        let mut ds_power = Vec::with_capacity(k_count);
        let mut ui_power = Array2::zeros((k_count, k_count));
        let mut sinr = Vec::with_capacity(k_count);
        for k in 0..k_count {
            let terms = self.terms(&phases, k);
            let signal = terms.ds.norm_sqr();
            let mut interference = 0.0;
            for (i, ui) in &terms.ui {
                let power = ui.norm_sqr();
                ui_power[[k, *i]] = power;
                interference += power;
            }
            ds_power.push(signal);
            sinr.push(signal / (interference + self.noise_term[k]));
        }
        let se: Vec<f64> = sinr.iter().map(|s| (1.0 + s).log2()).collect();
        let sum_se = se.iter().sum();
        SeReport {
            ds_power,
            ui_power,
            noise_term: self.noise_term.clone(),
            sinr,
            se,
            sum_se,
        }
    }

    fn check_offsets(&self, offsets: &[f64]) -> Result<()> {
        if offsets.len() != self.num_aps {
            return Err(Error::Dimension {
                context: "antenna offsets",
                expected: self.num_aps,
                got: offsets.len(),
            });
        }
        Ok(())
    }
}

fn check_placement(config: &ScenarioConfig, placement: &Placement) -> Result<()> {
    if placement.len() != config.num_aps {
        return Err(Error::Dimension {
            context: "placement",
            expected: config.num_aps,
            got: placement.len(),
        });
    }
    Placement::new(placement.positions().to_vec(), config.num_positions).map(|_| ())
}

/// `DS_k` and the `UI_i` (for `i != k`) of the centrally combined signal of TA `k`.
pub fn combined_signal_terms(
    config: &ScenarioConfig,
    geom: &Geometry,
    ch: &ChannelSet,
    placement: &Placement,
    k: usize,
) -> Result<CombinedTerms> {
    check_placement(config, placement)?;
    if k >= config.num_tas {
        return Err(Error::IndexOutOfRange {
            what: "TA",
            index: k,
            len: config.num_tas,
        });
    }
    let tables = Tables::new(config, geom, ch)?;
    let phases = tables.movement_phases(&placement.offsets(config.position_step), ChannelKind::Doppler);
    Ok(tables.terms(&phases, k))
}

/// Per-TA SINR and SE for a placement, with the sum SE objective.
pub fn sinr_and_se(
    config: &ScenarioConfig,
    geom: &Geometry,
    ch: &ChannelSet,
    placement: &Placement,
) -> Result<SeReport> {
    check_placement(config, placement)?;
    let tables = Tables::new(config, geom, ch)?;
    Ok(tables.report(&placement.offsets(config.position_step), ChannelKind::Doppler))
}

/// A validated scenario with its geometry, channels and cached combining tables.
///
/// Evaluation is a pure function of the placement, so a `Scenario` can be
/// shared freely across threads.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    geometry: Geometry,
    channels: ChannelSet,
    tables: Tables,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let geometry = build_geometry(&config)?;
        let channels = build_channels(&config, &geometry)?;
        let tables = Tables::new(&config, &geometry, &channels)?;
        Ok(Self {
            config,
            geometry,
            channels,
            tables,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn num_aps(&self) -> usize {
        self.config.num_aps
    }

    pub fn num_tas(&self) -> usize {
        self.config.num_tas
    }

    pub fn num_positions(&self) -> usize {
        self.config.num_positions
    }

    pub fn evaluate(&self, placement: &Placement) -> Result<SeReport> {
        self.evaluate_with(placement, ChannelKind::Doppler)
    }

    pub fn evaluate_with(&self, placement: &Placement, kind: ChannelKind) -> Result<SeReport> {
        check_placement(&self.config, placement)?;
        Ok(self
            .tables
            .report(&placement.offsets(self.config.position_step), kind))
    }

    /// Evaluates arbitrary antenna displacements in meters (continuous positions).
    pub fn evaluate_offsets(&self, offsets: &[f64], kind: ChannelKind) -> Result<SeReport> {
        self.tables.check_offsets(offsets)?;
        Ok(self.tables.report(offsets, kind))
    }

    pub fn terms(&self, placement: &Placement, k: usize) -> Result<CombinedTerms> {
        check_placement(&self.config, placement)?;
        if k >= self.config.num_tas {
            return Err(Error::IndexOutOfRange {
                what: "TA",
                index: k,
                len: self.config.num_tas,
            });
        }
        let phases = self.tables.movement_phases(
            &placement.offsets(self.config.position_step),
            ChannelKind::Doppler,
        );
        Ok(self.tables.terms(&phases, k))
    }

    /// Sum SE of a placement; the optimization objective.
    pub fn sum_se(&self, placement: &Placement) -> Result<f64> {
        self.evaluate(placement).map(|r| r.sum_se)
    }
}
