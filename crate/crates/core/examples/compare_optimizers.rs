//! Fixed antennas, random search and greedy coordinate ascent on the
//! 30-AP reference scenario.

use movcf::optimize::{fixed_baseline, greedy_coordinate_ascent, random_search, Objective};
use movcf::{Scenario, ScenarioConfig};

fn main() -> movcf::Result<()> {
    let scenario = Scenario::new(ScenarioConfig::default())?;
    let (l, n) = (scenario.num_aps(), scenario.num_positions());

    let fpa = fixed_baseline(&mut Objective::sum_se(&scenario), l)?;
    let greedy = greedy_coordinate_ascent(&mut Objective::sum_se(&scenario), l, n, 10)?;
    let random = random_search(&mut Objective::sum_se(&scenario), l, n, greedy.evaluations, 7)?;

    for (name, r) in [("fpa", &fpa), ("random", &random), ("greedy", &greedy)] {
        println!("{name:<7} {:>9.4} bit/s/Hz  {:>6} evaluations", r.best_value, r.evaluations);
    }
    println!("greedy placement: {}", greedy.best_placement);
    Ok(())
}
