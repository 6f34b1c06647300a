//! Independent and mixed (deterministic centre + independent) schemes, with
//! the mask printed as text.
//!
//! cargo run --release -p vds --example iid_sampling

use vds::density::{optimal_density, polynomial_density};
use vds::grid::GridDims;
use vds::sampler_iid::{draw_iid, draw_mixed};
use vds::scheme::{SamplingScheme, Stop};
use vds::transforms::{AcquisitionModel, WaveletSpec};

fn show(scheme: &SamplingScheme) {
    let width = scheme.dims.dims()[1];
    for row in scheme.mask().chunks(width) {
        println!(
            "{}",
            row.iter()
                .map(|&b| if b { '#' } else { '.' })
                .collect::<String>()
        );
    }
}

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![32, 32])?;
    let model = AcquisitionModel::new(dims.clone(), WaveletSpec::symmlet10(3))?;
    let n = dims.len();

    let pi = optimal_density(&model);
    let iid = draw_iid(&pi, Stop::distinct(n / 4, n), 1)?;
    println!(
        "iid from pi: {} distinct of {} draws",
        iid.m(),
        iid.raw_count()
    );
    show(&iid);

    let p = polynomial_density(&dims, 2.0)?;
    let mixed = draw_mixed(&model, &p, 64, Stop::distinct(n / 4, n), 1)?;
    println!(
        "\nmixed: {} deterministic + {} draws from 1/|k|^2 -> {} distinct",
        mixed.omega1.len(),
        mixed.raw_count(),
        mixed.m()
    );
    show(&mixed);
    Ok(())
}
