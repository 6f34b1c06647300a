//! Spiral, radial and random-angle radial baselines on a 64×64 grid, and the
//! radial occupation of the spiral against its closed form.
//!
//! cargo run --release -p vds --example parametric_curves

use vds::grid::GridDims;
use vds::sampler_parametric::{
    dc_centre, radial_occupation, radial_scheme, spiral_radial_density, spiral_scheme,
    spiral_trajectory, AngleRule, SpiralSpec,
};

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![64, 64])?;
    let spec = SpiralSpec {
        r0: 1.0 / 128.0,
        r1: 0.5,
        turns: 64,
        samples_per_turn: 256,
    };
    let traj = spiral_trajectory(&spec, &dc_centre(&dims))?;
    let edges: Vec<f64> = (0..=8)
        .map(|k| spec.r0 * (spec.r1 / spec.r0).powf(k as f64 / 8.0))
        .collect();
    let expected = spiral_radial_density(&spec, &edges);
    let measured = radial_occupation(&traj, &dc_centre(&dims), &edges, 1e-4)?;
    let tv: f64 = 0.5
        * expected
            .iter()
            .zip(&measured)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    println!("spiral, 64 turns: radial TV to closed form = {tv:.4}");

    let spiral = spiral_scheme(&dims, &spec)?;
    let radial = radial_scheme(&dims, 32, &AngleRule::Uniform)?;
    let random = radial_scheme(&dims, 32, &AngleRule::Random { seed: 4 })?;
    println!(
        "spiral: {} cells, radial (32 spokes): {}, random angles: {}",
        spiral.m(),
        radial.m(),
        random.m()
    );
    Ok(())
}
