//! Sum SE against the number of APs for fixed and greedily placed antennas.

use movcf::harness::{parse_config, run_sweep};

fn main() -> movcf::Result<()> {
    let spec = parse_config(
        "sweep_variable = num_aps\n\
         sweep_values = 5, 10, 15, 20, 25, 30\n\
         speeds_kmh = 0, 300\n\
         algorithms = fpa, greedy\n\
         greedy_max_passes = 3\n",
    )?;
    let output = run_sweep(&spec)?;
    for row in &output.rows {
        println!(
            "L={:<3} v={:<4} {:<7} {:.4}",
            row.num_aps,
            row.speed_kmh,
            row.algorithm.name(),
            row.sum_se
        );
    }
    Ok(())
}
