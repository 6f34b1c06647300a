//! 3D acquisition along readout lines: positions drawn on the phase-encoding
//! plane, each acquiring a full line along the last axis.
//!
//! cargo run --release -p vds --example lines3d

use vds::density::polynomial_density;
use vds::grid::GridDims;
use vds::sampler_parametric::lines3d_scheme;

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![32, 32, 32])?;
    let plane = polynomial_density(&GridDims::new(vec![32, 32])?, 2.0)?;
    let scheme = lines3d_scheme(&dims, &plane, 300, 2)?;
    println!(
        "300 lines drawn, {} distinct cells ({:.1}% of {})",
        scheme.m(),
        100.0 * scheme.m() as f64 / dims.len() as f64,
        dims.len()
    );
    Ok(())
}
