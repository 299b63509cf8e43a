//! Experiment plumbing: configuration files, sweeps over scenario
//! parameters, training runs and their CSV outputs.

mod config;
mod sweep;
mod training;

pub use config::{
    load_config, parse_config, positions_for_span, Algorithm, DsMode, ExperimentSpec,
    SweepVariable,
};
pub use sweep::{
    reevaluate, run_algorithm, run_sweep, write_placements_csv, write_results_csv, AlgorithmRun,
    PlacementRecord, ResultRow, SweepOutput, PLACEMENTS_HEADER, RESULTS_HEADER,
};
pub use training::{
    convergence_file_name, ds_mode_scenario, run_training, write_convergence_csv, TrainingRun,
    CONVERGENCE_HEADER,
};

/// Fixed-width float text with 17 significant digits, exact on read-back.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
