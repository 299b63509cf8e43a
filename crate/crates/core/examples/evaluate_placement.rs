//! Per-TA SINR and spectral efficiency of one antenna placement, with and
//! without the Doppler displacement.

use movcf::{ChannelKind, Placement, Scenario, ScenarioConfig};

fn main() -> movcf::Result<()> {
    let scenario = Scenario::new(ScenarioConfig::default())?;
    let placement: Placement = "1 3 5 7 9 2 4 6 8 10 1 3 5 7 9 2 4 6 8 10 1 3 5 7 9 2 4 6 8 10"
        .parse()?;

    let moving = scenario.evaluate(&placement)?;
    let static_los = scenario.evaluate_with(&placement, ChannelKind::LineOfSight)?;
    println!("ta  sinr(moving)  se(moving)  se(no doppler)");
    for k in 0..scenario.num_tas() {
        println!(
            "{k:>2}  {:>12.4}  {:>10.4}  {:>14.4}",
            moving.sinr[k], moving.se[k], static_los.se[k]
        );
    }
    println!("sum SE: {:.4} moving, {:.4} without doppler", moving.sum_se, static_los.sum_se);
    Ok(())
}
