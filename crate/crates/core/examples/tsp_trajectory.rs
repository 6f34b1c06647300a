//! A continuous trajectory whose occupation measure follows `p ∝ 1/|k|²`:
//! cities drawn from `p²`, a TSP path through them, then regridding.
//!
//! cargo run --release -p vds --example tsp_trajectory

use vds::density::polynomial_density;
use vds::empirical::tv_distance;
use vds::grid::GridDims;
use vds::sampler_tsp::{
    draw_points, mean_occupation, occupation_measure_on, regrid_trajectory, solve_tsp,
    target_to_initial_density, Effort,
};
use vds::scheme::Provenance;

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![16, 16])?;
    let p = polynomial_density(&dims, 2.0)?;
    let q = target_to_initial_density(&p, 2)?;

    // one curve is a noisy estimate of p; the mean over clouds converges

    for (label, effort) in [
        ("nearest neighbour", Effort::NearestNeighbor),
        ("2-opt", Effort::default()),
    ] {
        let cloud = draw_points(&q, 3000, 5)?;
        let curve = solve_tsp(&cloud, effort)?;
        let occupation = occupation_measure_on(&curve, &dims)?;
        println!(
            "{label:>17}: length {:.3}, TV(occupation, p) = {:.4}",
            curve.total_length,
            tv_distance(&occupation.mass, &p)?
        );
    }
    let mean = mean_occupation(&q, 3000, 20, Effort::default(), 5)?;
    println!(
        "mean of 20 curves: TV(occupation, p) = {:.4}",
        tv_distance(&mean, &p)?
    );

    let fine = GridDims::new(vec![64, 64])?;
    let q = target_to_initial_density(&polynomial_density(&fine, 2.0)?, 2)?;
    let curve = solve_tsp(&draw_points(&q, 800, 9)?, Effort::default())?;
    let scheme = regrid_trajectory(&curve, &fine, 9, Provenance::Tsp)?;
    println!(
        "\n800 cities on 64x64 -> {} distinct cells along the curve",
        scheme.m()
    );
    println!(
        "first vertices:\n{}",
        curve
            .to_csv()
            .lines()
            .take(4)
            .collect::<Vec<_>>()
            .join("\n")
    );
    Ok(())
}
