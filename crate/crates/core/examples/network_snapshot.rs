//! Saves a freshly initialised network to text and reloads it.

use movcf::nn::{default_layer_sizes, Mlp};

fn main() -> movcf::Result<()> {
    let net = Mlp::init(&default_layer_sizes(12, 5), 3)?;
    let dir = std::env::temp_dir().join("movcf_snapshot_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("actor.txt");
    net.save(&path)?;
    let restored = Mlp::load(&path)?;

    let input = [0.5; 12];
    println!("layers {:?}, {} parameters", net.layer_sizes(), net.parameter_count());
    println!("original {:?}", net.forward(&input)?.0);
    println!("restored {:?}", restored.forward(&input)?.0);
    println!("identical: {}", net == restored);
    Ok(())
}
