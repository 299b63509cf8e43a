//! Plain-text experiment configuration.
//!
//! One `key = value` per line; `#` starts a comment. Unknown keys are an
//! error and missing keys take the reference-scenario defaults. Lists are
//! comma-separated.
//!
//! | key | unit / values | default |
//! |-----|---------------|---------|
//! | `num_aps` | count `L` | 30 |
//! | `num_tas` | count `K` | 8 |
//! | `num_positions` | count `N` | 10 |
//! | `position_step_m` | meters `d_s` | half the carrier wavelength |
//! | `vertical_distance_m` | meters `d_ve` | 50 |
//! | `railway_length_m` | meters | 1000 |
//! | `train_length_m` | meters | 300 |
//! | `train_offset_m` | meters, rear of train | centered |
//! | `carrier_freq_hz` | Hz | 1.2e9 |
//! | `sample_duration_s` | seconds `T` | 4e-4 |
//! | `train_speed_mps` / `train_speed_kmh` | m/s or km/h (one of) | 300 km/h |
//! | `noise_power_w` / `noise_power_dbm` | W or dBm (one of) | -96 dBm |
//! | `uplink_power_w` | W, one value or `K` values | 0.1 |
//! | `pathloss_ref` | gain at 1 km | 1e-12 |
//! | `pathloss_exp` | exponent | 3 |
//! | `bandwidth_hz` | Hz (metadata) | 20e6 |
//! | `layout` | `midpoint` or `random` | midpoint |
//! | `layout_seed` | u64, used by `random` | 0 |
//! | `sweep_variable` | `algorithm`, `num_aps`, `vertical_distance_m`, `speed_kmh`, `rail_length_wavelengths` | algorithm |
//! | `sweep_values` | list of numbers (ignored for `algorithm`) | empty |
//! | `speeds_kmh` | list, grouping axis | unset: the scenario speed |
//! | `algorithms` | subset of `fpa,random,greedy,exhaustive,ppo` | fpa,random,greedy |
//! | `seeds` | list of u64 | 0 |
//! | `budget` | objective evaluations for random search and PPO | 5000 |
//! | `greedy_max_passes` | count | 10 |
//! | `exhaustive_cap` | max `N^L` | 1000000 |
//! | `ds_modes` | subset of `lambda,half_lambda,continuous` | all three |
//! | `output_dir` | path | results |
//! | `ppo_episodes` | count | 5000 |
//! | `ppo_steps_per_episode` | count | 10 |
//! | `ppo_discount` | `[0, 1)` | 0 |
//! | `ppo_clip` | `> 0` | 0.2 |
//! | `ppo_n_step` | count | 1 |
//! | `ppo_epochs` | count | 4 |
//! | `ppo_entropy_coef` | `>= 0` | 0.01 |
//! | `ppo_normalize_advantages` | bool | false |
//! | `ppo_memory_size` | transitions | 40960 |
//! | `ppo_batch_size` | transitions | 2048 |
//! | `ppo_hidden` | list of layer widths | 256,256 |
//! | `ppo_learning_rate` | initial SGD step | 3e-4 |
//! | `ppo_lr_decay_rate` | per decay interval | 0.99 |
//! | `ppo_lr_decay_steps` | episodes | 1e4 |
//! | `ppo_policy` | `categorical` or `gaussian` | categorical |
//! | `smoothing_window` | episodes | 100 |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::nn::SgdSchedule;
use crate::optimize::{search_space_size, DEFAULT_EXHAUSTIVE_CAP};
use crate::ppo::{PolicyKind, PpoConfig};
use crate::scenario::{kmh_to_mps, noise_power_watts, Layout, ScenarioConfig, LIGHT_SPEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// One point per algorithm on the base scenario.
    Algorithm,
    NumAps,
    VerticalDistance,
    SpeedKmh,
    /// Rail length `d_ap` in wavelengths; `N = d_ap / d_s`.
    RailLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Fpa,
    Random,
    Greedy,
    Exhaustive,
    Ppo,
}

/// Antenna-step mode for convergence runs; all modes share the rail length `d_ap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsMode {
    Lambda,
    HalfLambda,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: ScenarioConfig,
    pub sweep: SweepVariable,
    pub sweep_values: Vec<f64>,
    /// Grouping axis; `None` keeps the scenario speed.
    pub speeds_kmh: Option<Vec<f64>>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub budget: u64,
    pub greedy_max_passes: usize,
    pub exhaustive_cap: u64,
    pub ds_modes: Vec<DsMode>,
    pub ppo: PpoConfig,
    pub output_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let scenario = ScenarioConfig::default();
        Self {
            scenario,
            speeds_kmh: None,
            sweep: SweepVariable::Algorithm,
            sweep_values: Vec::new(),
            algorithms: vec![Algorithm::Fpa, Algorithm::Random, Algorithm::Greedy],
            seeds: vec![0],
            budget: 5000,
            greedy_max_passes: 10,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            ds_modes: vec![DsMode::Lambda, DsMode::HalfLambda, DsMode::Continuous],
            ppo: PpoConfig::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

macro_rules! named_enum {
    ($ty:ty { $($variant:path => $name:literal),* $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $($variant => $name),* }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($name => Ok($variant),)*
                    other => Err(format!(
                        "`{other}` is not one of {}",
                        [$($name),*].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(SweepVariable {
    SweepVariable::Algorithm => "algorithm",
    SweepVariable::NumAps => "num_aps",
    SweepVariable::VerticalDistance => "vertical_distance_m",
    SweepVariable::SpeedKmh => "speed_kmh",
    SweepVariable::RailLength => "rail_length_wavelengths",
});

named_enum!(Algorithm {
    Algorithm::Fpa => "fpa",
    Algorithm::Random => "random",
    Algorithm::Greedy => "greedy",
    Algorithm::Exhaustive => "exhaustive",
    Algorithm::Ppo => "ppo",
});

named_enum!(DsMode {
    DsMode::Lambda => "lambda",
    DsMode::HalfLambda => "half_lambda",
    DsMode::Continuous => "continuous",
});

const KEYS: &[&str] = &[
    "num_aps",
    "num_tas",
    "num_positions",
    "position_step_m",
    "vertical_distance_m",
    "railway_length_m",
    "train_length_m",
    "train_offset_m",
    "carrier_freq_hz",
    "sample_duration_s",
    "train_speed_mps",
    "train_speed_kmh",
    "noise_power_w",
    "noise_power_dbm",
    "uplink_power_w",
    "pathloss_ref",
    "pathloss_exp",
    "bandwidth_hz",
    "layout",
    "layout_seed",
    "sweep_variable",
    "sweep_values",
    "speeds_kmh",
    "algorithms",
    "seeds",
    "budget",
    "greedy_max_passes",
    "exhaustive_cap",
    "ds_modes",
    "output_dir",
    "ppo_episodes",
    "ppo_steps_per_episode",
    "ppo_discount",
    "ppo_clip",
    "ppo_n_step",
    "ppo_epochs",
    "ppo_entropy_coef",
    "ppo_normalize_advantages",
    "ppo_memory_size",
    "ppo_batch_size",
    "ppo_hidden",
    "ppo_learning_rate",
    "ppo_lr_decay_rate",
    "ppo_lr_decay_steps",
    "ppo_policy",
    "smoothing_window",
];

/// Raw `key -> (line, value)` table.
struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if map
                .insert(key.to_string(), (line, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|(line, value)| {
                value.parse::<T>().map_err(|e| Error::Parse {
                    line: *line,
                    message: format!("`{key}`: {e}"),
                })
            })
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|(line, value)| {
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<T>().map_err(|e| Error::Parse {
                            line: *line,
                            message: format!("`{key}`: {e}"),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn exclusive<T>(&self, a: &str, b: &str) -> Result<()> {
        if let (Some(_), Some((line, _))) = (self.0.get(a), self.0.get(b)) {
            return Err(Error::Parse {
                line: *line,
                message: format!("`{a}` and `{b}` are mutually exclusive"),
            });
        }
        Ok(())
    }
}

/// Reads and validates an experiment configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Parses configuration text; see the module documentation for the key schema.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let e = Entries::parse(text)?;
    e.exclusive::<()>("train_speed_mps", "train_speed_kmh")?;
    e.exclusive::<()>("noise_power_w", "noise_power_dbm")?;

    let d = ScenarioConfig::default();
    let num_aps = e.get("num_aps")?.unwrap_or(d.num_aps);
    let num_tas = e.get("num_tas")?.unwrap_or(d.num_tas);
    let carrier_freq = e.get("carrier_freq_hz")?.unwrap_or(d.carrier_freq);
    let railway_length = e.get("railway_length_m")?.unwrap_or(d.railway_length);
    let train_length = e.get("train_length_m")?.unwrap_or(d.train_length);
    let train_speed = match (e.get::<f64>("train_speed_mps")?, e.get::<f64>("train_speed_kmh")?) {
        (Some(mps), _) => mps,
        (None, Some(kmh)) => kmh_to_mps(kmh),
        (None, None) => d.train_speed,
    };
    let noise_power = match (e.get::<f64>("noise_power_w")?, e.get::<f64>("noise_power_dbm")?) {
        (Some(w), _) => w,
        (None, Some(dbm)) => noise_power_watts(dbm),
        (None, None) => d.noise_power,
    };
    let uplink_powers = match e.list::<f64>("uplink_power_w")? {
        None => vec![d.uplink_powers[0]; num_tas],
        Some(v) if v.len() == 1 => vec![v[0]; num_tas],
        Some(v) => v,
    };
    let layout = match e.get::<String>("layout")?.as_deref() {
        None | Some("midpoint") => Layout::Midpoint,
        Some("random") => Layout::RandomUniform {
            seed: e.get("layout_seed")?.unwrap_or(0),
        },
        Some(other) => {
            return Err(Error::Parse {
                line: e.0["layout"].0,
                message: format!("`layout`: `{other}` is not one of midpoint, random"),
            })
        }
    };
    let scenario = ScenarioConfig {
        num_aps,
        num_tas,
        num_positions: e.get("num_positions")?.unwrap_or(d.num_positions),
        position_step: e
            .get("position_step_m")?
            .unwrap_or(LIGHT_SPEED / carrier_freq / 2.0),
        vertical_distance: e.get("vertical_distance_m")?.unwrap_or(d.vertical_distance),
        railway_length,
        train_length,
        train_offset: e
            .get("train_offset_m")?
            .unwrap_or((railway_length - train_length) / 2.0),
        carrier_freq,
        sample_duration: e.get("sample_duration_s")?.unwrap_or(d.sample_duration),
        train_speed,
        noise_power,
        uplink_powers,
        pathloss_ref: e.get("pathloss_ref")?.unwrap_or(d.pathloss_ref),
        pathloss_exp: e.get("pathloss_exp")?.unwrap_or(d.pathloss_exp),
        bandwidth: e.get("bandwidth_hz")?.unwrap_or(d.bandwidth),
        layout,
    };

    let dp = PpoConfig::default();
    let ppo = PpoConfig {
        discount: e.get("ppo_discount")?.unwrap_or(dp.discount),
        clip: e.get("ppo_clip")?.unwrap_or(dp.clip),
        n_step: e.get("ppo_n_step")?.unwrap_or(dp.n_step),
        steps_per_episode: e.get("ppo_steps_per_episode")?.unwrap_or(dp.steps_per_episode),
        max_episodes: e.get("ppo_episodes")?.unwrap_or(dp.max_episodes),
        epochs_per_update: e.get("ppo_epochs")?.unwrap_or(dp.epochs_per_update),
        entropy_coef: e.get("ppo_entropy_coef")?.unwrap_or(dp.entropy_coef),
        normalize_advantages: e
            .get("ppo_normalize_advantages")?
            .unwrap_or(dp.normalize_advantages),
        memory_size: e.get("ppo_memory_size")?.unwrap_or(dp.memory_size),
        hidden_layers: e.list("ppo_hidden")?.unwrap_or(dp.hidden_layers),
        schedule: SgdSchedule {
            initial_lr: e.get("ppo_learning_rate")?.unwrap_or(dp.schedule.initial_lr),
            decay_rate: e.get("ppo_lr_decay_rate")?.unwrap_or(dp.schedule.decay_rate),
            decay_steps: e.get("ppo_lr_decay_steps")?.unwrap_or(dp.schedule.decay_steps),
            batch_size: e.get("ppo_batch_size")?.unwrap_or(dp.schedule.batch_size),
        },
        policy: match e.get::<String>("ppo_policy")?.as_deref() {
            None | Some("categorical") => PolicyKind::Categorical,
            Some("gaussian") => PolicyKind::Gaussian,
            Some(other) => {
                return Err(Error::Parse {
                    line: e.0["ppo_policy"].0,
                    message: format!("`ppo_policy`: `{other}` is not one of categorical, gaussian"),
                })
            }
        },
        smoothing_window: e.get("smoothing_window")?.unwrap_or(dp.smoothing_window),
        stop_at_reward: None,
        seed: 0,
    };

    let ds = ExperimentSpec::default();
    let seeds: Vec<u64> = e.list("seeds")?.unwrap_or(ds.seeds);
    let spec = ExperimentSpec {
        speeds_kmh: e.list("speeds_kmh")?,
        scenario,
        sweep: e.get("sweep_variable")?.unwrap_or(ds.sweep),
        sweep_values: e.list("sweep_values")?.unwrap_or_default(),
        algorithms: e.list("algorithms")?.unwrap_or(ds.algorithms),
        ppo: PpoConfig {
            seed: seeds.first().copied().unwrap_or(0),
            ..ppo
        },
        seeds,
        budget: e.get("budget")?.unwrap_or(ds.budget),
        greedy_max_passes: e.get("greedy_max_passes")?.unwrap_or(ds.greedy_max_passes),
        exhaustive_cap: e.get("exhaustive_cap")?.unwrap_or(ds.exhaustive_cap),
        ds_modes: e.list("ds_modes")?.unwrap_or(ds.ds_modes),
        output_dir: e
            .get::<String>("output_dir")?
            .map(PathBuf::from)
            .unwrap_or(ds.output_dir),
    };
    spec.validate()?;
    Ok(spec)
}

impl ExperimentSpec {
    /// Checks scenario, PPO and sweep invariants, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.ppo.validate()?;
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.sweep != SweepVariable::Algorithm && self.sweep_values.is_empty() {
            return fail(format!(
                "sweep_values must be non-empty for sweep_variable = {}",
                self.sweep.name()
            ));
        }
        if self.algorithms.is_empty() {
            return fail("algorithms must be non-empty".into());
        }
        if self.seeds.is_empty() {
            return fail("seeds must be non-empty".into());
        }
        if let Some(v) = &self.speeds_kmh {
            if v.is_empty() || v.iter().any(|x| !(*x >= 0.0)) {
                return fail("speeds_kmh must be a non-empty list of values >= 0".into());
            }
        }
        if self.budget == 0 {
            return fail("budget must be >= 1".into());
        }
        if self.greedy_max_passes == 0 {
            return fail("greedy_max_passes must be >= 1".into());
        }
        if self.ds_modes.is_empty() {
            return fail("ds_modes must be non-empty".into());
        }
        for (point, _) in self.sweep_points().into_iter().enumerate() {
            let scenario = self.point_scenario(point)?;
            scenario.validate()?;
            if self.algorithms.contains(&Algorithm::Exhaustive)
                && search_space_size(scenario.num_aps, scenario.num_positions)
                    > self.exhaustive_cap as f64
            {
                return fail(format!(
                    "exhaustive search needs N^L <= exhaustive_cap ({}), sweep point {point} has N={} L={}",
                    self.exhaustive_cap, scenario.num_positions, scenario.num_aps
                ));
            }
        }
        Ok(())
    }

    /// Sweep values, or a single placeholder point for an algorithm sweep.
    pub fn sweep_points(&self) -> Vec<f64> {
        match self.sweep {
            SweepVariable::Algorithm => vec![f64::NAN],
            _ => self.sweep_values.clone(),
        }
    }

    /// The base scenario with sweep point `point` applied (speed grouping not applied).
    pub fn point_scenario(&self, point: usize) -> Result<ScenarioConfig> {
        let value = self.sweep_points()[point];
        let mut s = self.scenario.clone();
        match self.sweep {
            SweepVariable::Algorithm => {}
            SweepVariable::NumAps => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "sweep value {value} is not a positive AP count"
                    )));
                }
                s.num_aps = value as usize;
            }
            SweepVariable::VerticalDistance => s.vertical_distance = value,
            SweepVariable::SpeedKmh => s.train_speed = kmh_to_mps(value),
            SweepVariable::RailLength => {
                s.num_positions = positions_for_span(value * s.wavelength(), s.position_step)?;
            }
        }
        Ok(s)
    }

    /// Serializes every key explicitly; `parse_config(dump())` reproduces `self`.
    pub fn dump(&self) -> String {
        let s = &self.scenario;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
        kv("num_aps", s.num_aps.to_string());
        kv("num_tas", s.num_tas.to_string());
        kv("num_positions", s.num_positions.to_string());
        kv("position_step_m", format!("{:e}", s.position_step));
        kv("vertical_distance_m", format!("{:e}", s.vertical_distance));
        kv("railway_length_m", format!("{:e}", s.railway_length));
        kv("train_length_m", format!("{:e}", s.train_length));
        kv("train_offset_m", format!("{:e}", s.train_offset));
        kv("carrier_freq_hz", format!("{:e}", s.carrier_freq));
        kv("sample_duration_s", format!("{:e}", s.sample_duration));
        kv("train_speed_mps", format!("{:e}", s.train_speed));
        kv("noise_power_w", format!("{:e}", s.noise_power));
        kv("uplink_power_w", list(&s.uplink_powers));
        kv("pathloss_ref", format!("{:e}", s.pathloss_ref));
        kv("pathloss_exp", format!("{:e}", s.pathloss_exp));
        kv("bandwidth_hz", format!("{:e}", s.bandwidth));
        match s.layout {
            Layout::Midpoint => kv("layout", "midpoint".into()),
            Layout::RandomUniform { seed } => {
                kv("layout", "random".into());
                kv("layout_seed", seed.to_string());
            }
        }
        kv("sweep_variable", self.sweep.name().into());
        if !self.sweep_values.is_empty() {
            kv("sweep_values", list(&self.sweep_values));
        }
        if let Some(v) = &self.speeds_kmh {
            kv("speeds_kmh", list(v));
        }
        kv(
            "algorithms",
            self.algorithms.iter().map(|a| a.name()).collect::<Vec<_>>().join(","),
        );
        kv(
            "seeds",
            self.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
        );
        kv("budget", self.budget.to_string());
        kv("greedy_max_passes", self.greedy_max_passes.to_string());
        kv("exhaustive_cap", self.exhaustive_cap.to_string());
        kv(
            "ds_modes",
            self.ds_modes.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
        );
        kv("output_dir", self.output_dir.display().to_string());
        let p = &self.ppo;
        kv("ppo_episodes", p.max_episodes.to_string());
        kv("ppo_steps_per_episode", p.steps_per_episode.to_string());
        kv("ppo_discount", format!("{:e}", p.discount));
        kv("ppo_clip", format!("{:e}", p.clip));
        kv("ppo_n_step", p.n_step.to_string());
        kv("ppo_epochs", p.epochs_per_update.to_string());
        kv("ppo_entropy_coef", format!("{:e}", p.entropy_coef));
        kv("ppo_normalize_advantages", p.normalize_advantages.to_string());
        kv("ppo_memory_size", p.memory_size.to_string());
        kv("ppo_batch_size", p.schedule.batch_size.to_string());
        kv(
            "ppo_hidden",
            p.hidden_layers.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        );
        kv("ppo_learning_rate", format!("{:e}", p.schedule.initial_lr));
        kv("ppo_lr_decay_rate", format!("{:e}", p.schedule.decay_rate));
        kv("ppo_lr_decay_steps", format!("{:e}", p.schedule.decay_steps));
        kv(
            "ppo_policy",
            match p.policy {
                PolicyKind::Categorical => "categorical",
                PolicyKind::Gaussian => "gaussian",
            }
            .into(),
        );
        kv("smoothing_window", p.smoothing_window.to_string());
        out
    }
}

/// `N = span / step`, rejecting spans that are not a whole number of steps.
pub fn positions_for_span(span: f64, step: f64) -> Result<usize> {
    let n = (span / step).round();
    if n < 1.0 || ((n * step - span) / span).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "rail length {span} m is not a whole number of {step} m steps"
        )));
    }
    Ok(n as usize)
}
