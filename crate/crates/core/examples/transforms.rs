//! Orthogonal wavelet and unitary Fourier transforms, and the VDSG grid file.
//!
//! cargo run --release -p vds --example transforms

use vds::grid::{GridDims, RealGrid};
use vds::transforms::{wavelet_forward, wavelet_inverse, AcquisitionModel, WaveletSpec};

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![16, 16])?;
    let image = RealGrid::from_fn(dims.clone(), |i| {
        ((i % 16) as f64 - 7.5).abs() + (i / 16) as f64
    });
    let spec = WaveletSpec::symmlet10(2);
    let coeffs = wavelet_forward(&image, &spec)?;
    let back = wavelet_inverse(&coeffs, &spec)?;
    let err = image
        .data
        .iter()
        .zip(&back.data)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let energy = |g: &RealGrid| g.data.iter().map(|v| v * v).sum::<f64>();
    println!(
        "round trip error {err:.1e}, energy {:.6} -> {:.6}",
        energy(&image),
        energy(&coeffs)
    );

    let model = AcquisitionModel::new(dims.clone(), spec)?;
    let row = model.row(dims.dc_index())?;
    println!(
        "DC row of A: infinity norm {:.4}",
        row.iter().map(|v| v.norm()).fold(0.0, f64::max)
    );

    let path = std::env::temp_dir().join("vds_example.vdsg");
    coeffs.save(&path)?;
    assert_eq!(RealGrid::load(&path)?, coeffs);
    println!("wrote and re-read {}", path.display());
    Ok(())
}
