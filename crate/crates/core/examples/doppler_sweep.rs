//! Sum SE of fixed antennas against the AP height offset, at rest and at
//! 300 km/h. Writes `results/doppler_sweep.csv` plus its placement sidecar.

use std::path::Path;

use movcf::harness::{parse_config, run_sweep};

const CONFIG: &str = "
sweep_variable = vertical_distance_m
sweep_values = 20, 40, 60, 80, 100
speeds_kmh = 0, 300
algorithms = fpa, greedy
greedy_max_passes = 3
";

fn main() -> movcf::Result<()> {
    let spec = parse_config(CONFIG)?;
    let output = run_sweep(&spec)?;
    println!("d_ve_m  v_kmh  algorithm  sum_se");
    for row in &output.rows {
        println!(
            "{:>6}  {:>5}  {:<9}  {:.4}",
            row.vertical_distance, row.speed_kmh, row.algorithm.name(), row.sum_se
        );
    }
    let (csv, _) = output.write(Path::new("results"), "doppler_sweep")?;
    println!("wrote {}", csv.display());
    Ok(())
}
