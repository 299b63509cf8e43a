use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{Algorithm, ExperimentSpec, SweepVariable};
use super::fmt_f64;
use crate::error::{Error, Result};
use crate::model::{ChannelKind, Scenario};
use crate::optimize::{
    exhaustive_search, fixed_baseline, greedy_coordinate_ascent, random_search, Objective,
};
use crate::ppo::{train, Action, PpoConfig};
use crate::scenario::{kmh_to_mps, mps_to_kmh, ScenarioConfig};

pub const RESULTS_HEADER: [&str; 13] = [
    "scenario_id",
    "algorithm",
    "L",
    "K",
    "N",
    "d_s_over_lambda",
    "d_ve_m",
    "v_kmh",
    "d_ap_over_lambda",
    "seed",
    "sum_se_bps_hz",
    "evaluations",
    "wall_ms",
];

pub const PLACEMENTS_HEADER: [&str; 5] = ["scenario_id", "algorithm", "seed", "kind", "placement"];

/// One optimizer outcome on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario_id: usize,
    pub algorithm: Algorithm,
    pub num_aps: usize,
    pub num_tas: usize,
    pub num_positions: usize,
    pub step_over_lambda: f64,
    pub vertical_distance: f64,
    pub speed_kmh: f64,
    pub span_over_lambda: f64,
    pub seed: u64,
    pub sum_se: f64,
    pub evaluations: u64,
    /// Informational; excluded from determinism checks.
    pub wall_ms: u64,
}

impl ResultRow {
    fn record(&self) -> [String; 13] {
        [
            self.scenario_id.to_string(),
            self.algorithm.name().to_string(),
            self.num_aps.to_string(),
            self.num_tas.to_string(),
            self.num_positions.to_string(),
            fmt_f64(self.step_over_lambda),
            fmt_f64(self.vertical_distance),
            fmt_f64(self.speed_kmh),
            fmt_f64(self.span_over_lambda),
            self.seed.to_string(),
            fmt_f64(self.sum_se),
            self.evaluations.to_string(),
            self.wall_ms.to_string(),
        ]
    }
}

/// The placement behind a [`ResultRow`], for re-deriving its sum SE.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementRecord {
    pub scenario_id: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub action: Action,
}

impl PlacementRecord {
    fn record(&self) -> [String; 5] {
        let (kind, text) = match &self.action {
            Action::Discrete(p) => ("discrete", p.to_string()),
            Action::Continuous(x) => (
                "continuous",
                x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" "),
            ),
        };
        [
            self.scenario_id.to_string(),
            self.algorithm.name().to_string(),
            self.seed.to_string(),
            kind.to_string(),
            text,
        ]
    }
}

/// Best value, the action that produced it and the evaluation count.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub best_value: f64,
    pub action: Action,
    pub evaluations: u64,
}

/// Runs one algorithm on one scenario with the experiment's budgets.
///
/// Random search gets `budget` evaluations. PPO gets `budget /
/// steps_per_episode` episodes, plus the one evaluation of its reset state.
pub fn run_algorithm(
    scenario: &Scenario,
    algorithm: Algorithm,
    spec: &ExperimentSpec,
    seed: u64,
) -> Result<AlgorithmRun> {
    let (l, n) = (scenario.num_aps(), scenario.num_positions());
    let mut obj = Objective::sum_se(scenario);
    let result = match algorithm {
        Algorithm::Fpa => fixed_baseline(&mut obj, l)?,
        Algorithm::Random => random_search(&mut obj, l, n, spec.budget, seed)?,
        Algorithm::Greedy => greedy_coordinate_ascent(&mut obj, l, n, spec.greedy_max_passes)?,
        Algorithm::Exhaustive => exhaustive_search(&mut obj, l, n, spec.exhaustive_cap)?,
        Algorithm::Ppo => {
            let config = PpoConfig {
                seed,
                max_episodes: (spec.budget / spec.ppo.steps_per_episode as u64).max(1),
                ..spec.ppo.clone()
            };
            let log = train(scenario, &config)?;
            return Ok(AlgorithmRun {
                best_value: log.best_reward,
                action: log.best_action.expect("at least one episode"),
                evaluations: log.evaluations,
            });
        }
    };
    Ok(AlgorithmRun {
        best_value: result.best_value,
        action: Action::Discrete(result.best_placement),
        evaluations: result.evaluations,
    })
}

/// Sum SE of a logged action on `scenario`.
pub fn reevaluate(scenario: &Scenario, action: &Action) -> Result<f64> {
    match action {
        Action::Discrete(p) => scenario.sum_se(p),
        Action::Continuous(x) => {
            let span = scenario.config().rail_span();
            let offsets: Vec<f64> = x.iter().map(|v| v.clamp(0.0, span)).collect();
            Ok(scenario.evaluate_offsets(&offsets, ChannelKind::Doppler)?.sum_se)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub placements: Vec<PlacementRecord>,
}

impl SweepOutput {
    /// Writes `<stem>.csv` and `<stem>_placements.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let results = dir.join(format!("{stem}.csv"));
        let placements = dir.join(format!("{stem}_placements.csv"));
        write_results_csv(std::fs::File::create(&results)?, &self.rows)?;
        write_placements_csv(std::fs::File::create(&placements)?, &self.placements)?;
        Ok((results, placements))
    }
}

pub fn write_results_csv(out: impl Write, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_placements_csv(out: impl Write, records: &[PlacementRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLACEMENTS_HEADER)?;
    for r in records {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

fn point_label(spec: &ExperimentSpec, value: f64, speed_kmh: f64) -> String {
    match spec.sweep {
        SweepVariable::Algorithm | SweepVariable::SpeedKmh => format!("v={speed_kmh} km/h"),
        other => format!("{}={value}, v={speed_kmh} km/h", other.name()),
    }
}

/// Runs every (sweep point, speed, algorithm, seed) combination in that
/// nesting order. Each (point, speed) pair gets its own `scenario_id`.
/// A speed sweep ignores `speeds_kmh`.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let mut out = SweepOutput {
        rows: Vec::new(),
        placements: Vec::new(),
    };
    let points = spec.sweep_points();
    let mut scenario_id = 0;
    for (point, &value) in points.iter().enumerate() {
        let base = spec.point_scenario(point)?;
        let speeds: Vec<f64> = match (&spec.speeds_kmh, spec.sweep) {
            (Some(v), s) if s != SweepVariable::SpeedKmh => v.iter().map(|x| kmh_to_mps(*x)).collect(),
            _ => vec![base.train_speed],
        };
        for train_speed in speeds {
            let config = ScenarioConfig {
                train_speed,
                ..base.clone()
            };
            let speed_kmh = mps_to_kmh(train_speed);
            let wrap = |e: Error| Error::SweepPoint {
                point,
                label: point_label(spec, value, speed_kmh),
                source: Box::new(e),
            };
            let scenario = Scenario::new(config).map_err(wrap)?;
            for &algorithm in &spec.algorithms {
                for &seed in &spec.seeds {
                    let started = Instant::now();
                    let run = run_algorithm(&scenario, algorithm, spec, seed).map_err(wrap)?;
                    out.rows.push(row(&scenario, scenario_id, algorithm, seed, &run, started));
                    out.placements.push(PlacementRecord {
                        scenario_id,
                        algorithm,
                        seed,
                        action: run.action,
                    });
                }
            }
            scenario_id += 1;
        }
    }
    Ok(out)
}

fn row(
    scenario: &Scenario,
    scenario_id: usize,
    algorithm: Algorithm,
    seed: u64,
    run: &AlgorithmRun,
    started: Instant,
) -> ResultRow {
    let c = scenario.config();
    let lambda = c.wavelength();
    ResultRow {
        scenario_id,
        algorithm,
        num_aps: c.num_aps,
        num_tas: c.num_tas,
        num_positions: c.num_positions,
        step_over_lambda: c.position_step / lambda,
        vertical_distance: c.vertical_distance,
        speed_kmh: mps_to_kmh(c.train_speed),
        span_over_lambda: c.rail_span() / lambda,
        seed,
        sum_se: run.best_value,
        evaluations: run.evaluations,
        wall_ms: started.elapsed().as_millis() as u64,
    }
}

