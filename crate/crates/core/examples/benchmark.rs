//! A small Monte Carlo PSNR benchmark driven by a TOML config, the same path
//! the `vds benchmark` command takes.
//!
//! cargo run --release -p vds --example benchmark

use std::path::Path;

use vds::experiment::{run_benchmark, ExperimentConfig};

const CONFIG: &str = r#"
dims = [32, 32]
sampling_ratio = 4.0
m1_fraction = 0.1
trials = 3
seed = 5

[wavelet]
levels = 3
family = { kind = "symmlet10" }

[reconstruction]
max_iter = 300

[[schemes]]
name = "tsp"
kind = "tsp"
density = { kind = "polynomial", exponent = 2.0 }

[[schemes]]
name = "markov_0.1"
kind = "markov"
alpha = 0.1
density = { kind = "polynomial", exponent = 2.0 }

[[schemes]]
name = "radial_random"
kind = "radial_random"
"#;

fn main() -> vds::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG, Path::new("."))?;
    print!("{}", run_benchmark(&cfg)?.to_csv());
    Ok(())
}
