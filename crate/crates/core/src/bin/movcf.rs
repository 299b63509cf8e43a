use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use movcf::harness::{self, Algorithm, ExperimentSpec, SweepVariable};
use movcf::{ChannelKind, Placement, Result, Scenario};

#[derive(Parser)]
#[command(name = "movcf", version, about = "Movable-antenna cell-free uplink simulator")]
struct Cli {
    /// Experiment configuration file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replaces the configured seed list with this single seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-TA SINR and SE of one placement.
    Evaluate {
        /// 1-based positions, comma or space separated.
        #[arg(long)]
        placement: Placement,
        /// Ignore the Doppler displacement.
        #[arg(long)]
        los: bool,
    },
    /// Exhaustive search over all placements.
    Oracle,
    /// Random search or greedy coordinate ascent.
    Optimize {
        #[arg(long, value_enum)]
        method: Method,
        /// Evaluation budget for random search.
        #[arg(long)]
        budget: Option<u64>,
        /// Pass limit for greedy ascent.
        #[arg(long)]
        passes: Option<usize>,
    },
    /// PPO convergence runs, one CSV per step mode and seed.
    Train,
    /// Full experiment sweep.
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Random,
    Greedy,
}

fn load_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let mut spec = match &cli.config {
        Some(path) => harness::load_config(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(seed) = cli.seed {
        spec.seeds = vec![seed];
        spec.ppo.seed = seed;
    }
    if let Some(out) = &cli.out {
        spec.output_dir = out.clone();
    }
    Ok(spec)
}

/// Runs `algorithms` on the base scenario only and writes `<stem>.csv`.
fn single_point(mut spec: ExperimentSpec, algorithms: Vec<Algorithm>, stem: &str) -> Result<()> {
    spec.sweep = SweepVariable::Algorithm;
    spec.sweep_values.clear();
    spec.speeds_kmh = None;
    spec.algorithms = algorithms;
    let output = harness::run_sweep(&spec)?;
    for (row, p) in output.rows.iter().zip(&output.placements) {
        println!(
            "{} seed {}: sum SE {:.6} bit/s/Hz after {} evaluations, placement {}",
            row.algorithm.name(),
            row.seed,
            row.sum_se,
            row.evaluations,
            p.action
        );
    }
    let (results, _) = output.write(&spec.output_dir, stem)?;
    println!("wrote {}", results.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut spec = load_spec(&cli)?;
    match cli.command {
        Command::Evaluate { placement, los } => {
            let scenario = Scenario::new(spec.scenario)?;
            let kind = if los {
                ChannelKind::LineOfSight
            } else {
                ChannelKind::Doppler
            };
            println!("{}", scenario.evaluate_with(&placement, kind)?);
        }
        Command::Oracle => single_point(spec, vec![Algorithm::Exhaustive], "oracle")?,
        Command::Optimize {
            method,
            budget,
            passes,
        } => {
            spec.budget = budget.unwrap_or(spec.budget);
            spec.greedy_max_passes = passes.unwrap_or(spec.greedy_max_passes);
            let (algorithm, stem) = match method {
                Method::Random => (Algorithm::Random, "optimize_random"),
                Method::Greedy => (Algorithm::Greedy, "optimize_greedy"),
            };
            single_point(spec, vec![algorithm], stem)?;
        }
        Command::Train => {
            for run in harness::run_training(&spec)? {
                println!(
                    "{} seed {}: best {:.6} bit/s/Hz, wrote {}",
                    run.mode.name(),
                    run.seed,
                    run.log.best_reward,
                    run.path.display()
                );
            }
        }
        Command::Sweep => {
            let output = harness::run_sweep(&spec)?;
            let (results, placements) = output.write(&spec.output_dir, "sweep")?;
            println!(
                "{} rows, wrote {} and {}",
                output.rows.len(),
                results.display(),
                placements.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
