//! `T(Y_N) / √N` for uniform clouds in the unit square settles near the
//! Beardwood-Halton-Hammersley constant (about 0.71 for optimal tours; the
//! heuristic path sits a few percent above).
//!
//! cargo run --release -p vds --example bhh_constant

use vds::sampler_tsp::{estimate_bhh_constant, Effort};

fn main() -> vds::Result<()> {
    for n in [250, 1000, 4000, 10000] {
        let e = estimate_bhh_constant(2, n, 8, Effort::default(), 3)?;
        println!("N = {n:>5}: {:.4} ± {:.4}", e.mean, e.std);
    }
    let e = estimate_bhh_constant(3, 4000, 4, Effort::default(), 3)?;
    println!("3D, N = 4000: T / N^(2/3) = {:.4}", e.mean);
    Ok(())
}
