//! Exact recovery of a sparse wavelet vector from a mixed scheme by
//! Douglas-Rachford, and PSNR of a phantom reconstruction.
//!
//! cargo run --release -p vds --example sparse_recovery

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use vds::density::optimal_density;
use vds::experiment::{reconstruct_and_score, shepp_logan};
use vds::grid::GridDims;
use vds::reconstruct::{douglas_rachford, ReconstructionConfig};
use vds::rng::rng_from_seed;
use vds::sampler_iid::draw_mixed;
use vds::scheme::Stop;
use vds::transforms::{AcquisitionModel, WaveletSpec};

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![32, 32])?;
    let model = AcquisitionModel::new(dims.clone(), WaveletSpec::haar(3))?;
    let n = model.n();
    let mut rng = rng_from_seed(2);

    let mut z = vec![Complex64::default(); n];
    for i in sample(&mut rng, n, 20) {
        z[i] = Complex64::new(if rng.gen() { 1.0 } else { -1.0 }, 0.0);
    }
    let m = (0.35 * n as f64).round() as usize;
    let scheme = draw_mixed(
        &model,
        &optimal_density(&model),
        64,
        Stop::distinct(m, n),
        2,
    )?;
    let full = model.apply(&z)?;
    let y: Vec<Complex64> = scheme.omega.iter().map(|&i| full[i]).collect();
    let result = douglas_rachford(&model, &scheme.omega, &y, &ReconstructionConfig::default())?;
    let err = result
        .coefficients
        .iter()
        .zip(&z)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    println!(
        "20-sparse, m = {m}: relative error {err:.2e}, {} iterations, feasibility {:.1e}",
        result.iterations, result.feasibility_residual
    );

    let phantom = shepp_logan(&dims)?;
    let config = ReconstructionConfig {
        max_iter: 500,
        ..Default::default()
    };
    let (_, psnr) = reconstruct_and_score(&model, &phantom, &scheme, &config)?;
    println!("phantom from the same scheme: PSNR {psnr:.2} dB");
    Ok(())
}
