//! Short PPO convergence runs for antenna steps of one wavelength, half a
//! wavelength and continuous positions over the same rail length.
//! Writes one CSV per mode under `results/`.

use movcf::harness::{parse_config, run_training};

fn main() -> movcf::Result<()> {
    let spec = parse_config(
        "num_aps = 4\nnum_tas = 3\nnum_positions = 8\n\
         ppo_episodes = 300\nppo_batch_size = 256\nppo_memory_size = 4096\n\
         smoothing_window = 20\noutput_dir = results\n",
    )?;
    for run in run_training(&spec)? {
        let last = run.log.episodes.last().expect("episodes");
        println!(
            "{:<11} smoothed {:.4}  best {:.4}  -> {}",
            run.mode.name(),
            last.reward_smoothed,
            run.log.best_reward,
            run.path.display()
        );
    }
    Ok(())
}
