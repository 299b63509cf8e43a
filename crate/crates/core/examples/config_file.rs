//! Parses an experiment configuration and prints its fully expanded form.

use movcf::harness::parse_config;

fn main() {
    let text = "num_aps = 8\nuplink_power_w = 0.2\ntrain_speed_kmh = 350\nalgorithms = fpa, random\n";
    match parse_config(text) {
        Ok(spec) => print!("{}", spec.dump()),
        Err(e) => eprintln!("error[{}]: {e}", e.category()),
    }
    match parse_config("num_aps = 8\nnum_antennas = 2\n") {
        Ok(_) => unreachable!(),
        Err(e) => eprintln!("rejected as expected: {e}"),
    }
}
