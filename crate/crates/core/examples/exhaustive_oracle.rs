//! Global optimum of a small scenario by full enumeration.

use movcf::optimize::{exhaustive_search, fixed_baseline, Objective, DEFAULT_EXHAUSTIVE_CAP};
use movcf::{Scenario, ScenarioConfig};

fn main() -> movcf::Result<()> {
    let config = ScenarioConfig {
        num_aps: 4,
        num_positions: 4,
        ..ScenarioConfig::default()
    }
    .with_num_tas(3);
    let scenario = Scenario::new(config)?;

    let mut objective = Objective::sum_se(&scenario);
    let optimum = exhaustive_search(&mut objective, 4, 4, DEFAULT_EXHAUSTIVE_CAP)?;
    let baseline = fixed_baseline(&mut Objective::sum_se(&scenario), 4)?;

    println!("optimum  {} -> {:.6} bit/s/Hz", optimum.best_placement, optimum.best_value);
    println!("fixed    {} -> {:.6} bit/s/Hz", baseline.best_placement, baseline.best_value);
    println!("{} placements evaluated; improvements:", optimum.evaluations);
    for (eval, value) in &optimum.trace {
        println!("  #{eval:<4} {value:.6}");
    }
    Ok(())
}
