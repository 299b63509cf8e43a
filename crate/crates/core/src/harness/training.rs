use std::io::Write;
use std::path::PathBuf;

use super::config::{positions_for_span, DsMode, ExperimentSpec};
use super::fmt_f64;
use crate::error::Result;
use crate::model::Scenario;
use crate::ppo::{train, PolicyKind, PpoConfig, TrainingLog};
use crate::scenario::ScenarioConfig;

pub const CONVERGENCE_HEADER: [&str; 4] = ["episode", "reward_raw", "reward_smoothed", "lr"];

/// The base scenario re-gridded for `mode`, keeping the rail length `N d_s`.
pub fn ds_mode_scenario(base: &ScenarioConfig, mode: DsMode) -> Result<ScenarioConfig> {
    let span = base.rail_span();
    let step = match mode {
        DsMode::Continuous => return Ok(base.clone()),
        DsMode::Lambda => base.wavelength(),
        DsMode::HalfLambda => base.wavelength() / 2.0,
    };
    Ok(ScenarioConfig {
        num_positions: positions_for_span(span, step)?,
        position_step: step,
        ..base.clone()
    })
}

pub fn convergence_file_name(mode: DsMode, seed: u64) -> String {
    format!("convergence_{}_seed{seed}.csv", mode.name())
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub mode: DsMode,
    pub seed: u64,
    pub log: TrainingLog,
    pub path: PathBuf,
}

pub fn write_convergence_csv(out: impl Write, log: &TrainingLog) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONVERGENCE_HEADER)?;
    for e in &log.episodes {
        w.write_record([
            e.episode.to_string(),
            fmt_f64(e.reward_raw),
            fmt_f64(e.reward_smoothed),
            fmt_f64(e.lr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Trains one agent per (step mode, seed) and writes a convergence CSV for
/// each into `spec.output_dir`. Continuous mode uses the Gaussian policy.
pub fn run_training(spec: &ExperimentSpec) -> Result<Vec<TrainingRun>> {
    spec.validate()?;
    std::fs::create_dir_all(&spec.output_dir)?;
    let mut runs = Vec::new();
    for &mode in &spec.ds_modes {
        let scenario = Scenario::new(ds_mode_scenario(&spec.scenario, mode)?)?;
        for &seed in &spec.seeds {
            let config = PpoConfig {
                seed,
                policy: match mode {
                    DsMode::Continuous => PolicyKind::Gaussian,
                    _ => PolicyKind::Categorical,
                },
                ..spec.ppo.clone()
            };
            let log = train(&scenario, &config)?;
            let path = spec.output_dir.join(convergence_file_name(mode, seed));
            write_convergence_csv(std::fs::File::create(&path)?, &log)?;
            runs.push(TrainingRun {
                mode,
                seed,
                log,
                path,
            });
        }
    }
    Ok(runs)
}
