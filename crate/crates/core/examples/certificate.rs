//! The inexact dual certificate residual `‖I - W_m‖∞` for iid visits from the
//! optimal density, shrinking with the number of visits.
//!
//! cargo run --release -p vds --example certificate

use vds::density::{optimal_density, DensityGrid};
use vds::grid::GridDims;
use vds::sampler_iid::draw_iid;
use vds::sampler_markov::juditsky_certificate;
use vds::scheme::Stop;
use vds::transforms::{AcquisitionModel, WaveletSpec};

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![16, 16])?;
    let model = AcquisitionModel::new(dims.clone(), WaveletSpec::haar(3))?;
    let full: Vec<usize> = (0..model.n()).collect();
    let exact = juditsky_certificate(&model, &DensityGrid::uniform(dims), &full, 16)?;
    println!("full sampling: residual {:.1e}", exact.infnorm_residual);

    let pi = optimal_density(&model);
    for m in [256, 1024, 4096, 16384] {
        let draws = draw_iid(&pi, Stop::Draws(m), 5)?.draw_log;
        let r = juditsky_certificate(&model, &pi, &draws, 16)?;
        println!(
            "m = {m:>5}: residual {:.4}, certified sparsity {}",
            r.infnorm_residual, r.max_certified_s
        );
    }
    Ok(())
}
