//! PPO on a 4-AP scenario, compared against the exhaustive optimum.
//!
//! `cargo run --release --example train_ppo -- [episodes]`

use movcf::optimize::{exhaustive_search, Objective, DEFAULT_EXHAUSTIVE_CAP};
use movcf::ppo::{PpoConfig, Trainer};
use movcf::{Scenario, ScenarioConfig};

fn main() -> movcf::Result<()> {
    let episodes = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(600);
    let config = ScenarioConfig {
        num_aps: 4,
        num_positions: 4,
        ..ScenarioConfig::default()
    }
    .with_num_tas(3);
    let scenario = Scenario::new(config)?;
    let optimum = exhaustive_search(&mut Objective::sum_se(&scenario), 4, 4, DEFAULT_EXHAUSTIVE_CAP)?;

    let ppo = PpoConfig {
        max_episodes: episodes,
        seed: 1,
        ..PpoConfig::default()
    };
    let mut trainer = Trainer::new(&scenario, &ppo)?;
    for _ in 0..episodes {
        let record = trainer.run_episode()?;
        if record.episode % 100 == 99 {
            println!(
                "episode {:>5}  smoothed {:.4}  best {:.4}  lr {:.3e}",
                record.episode + 1,
                record.reward_smoothed,
                record.best_so_far,
                record.lr
            );
        }
    }
    let log = trainer.log();
    println!(
        "best {} -> {:.6} ({:.1}% of the optimum {:.6} at {})",
        log.best_action.as_ref().expect("trained"),
        log.best_reward,
        100.0 * log.best_reward / optimum.best_value,
        optimum.best_value,
        optimum.best_placement
    );
    Ok(())
}
