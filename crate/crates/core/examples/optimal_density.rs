//! The coherence-optimal density `π ∝ ‖a_i‖∞²` for a Fourier-wavelet model,
//! its K value against a polynomial alternative, and the sample-count bounds.
//!
//! cargo run --release -p vds --example optimal_density

use vds::density::{
    bound_iid, bound_mixed, deterministic_set, k_value, k_value_excluding, optimal_density,
    polynomial_density,
};
use vds::grid::GridDims;
use vds::transforms::{AcquisitionModel, WaveletSpec};

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![32, 32])?;
    for spec in [
        WaveletSpec::haar(3),
        WaveletSpec::symmlet10(3),
        WaveletSpec::identity(),
    ] {
        let model = AcquisitionModel::new(dims.clone(), spec.clone())?;
        let pi = optimal_density(&model);
        let k_pi = k_value(&model, &pi)?;
        let k_poly = k_value(&model, &polynomial_density(&dims, 2.0)?)?;
        println!(
            "{:?}: K(pi) = {k_pi:.4}, K(1/|k|^2) = {k_poly:.4}",
            spec.family
        );

        let n = model.n();
        let m1 = 64;
        let omega1 = deterministic_set(&model, m1)?;
        let k_rest = k_value_excluding(&model, &pi, &omega1)?;
        let iid = bound_iid(n, k_pi, 10, 0.05)?;
        let mixed = bound_mixed(n, k_rest, m1, 10, 0.05)?;
        println!(
            "  s = 10, eta = 0.05: iid needs m >= {:.0}, mixed (m1 = {m1}) needs m >= {:.0}  (n = {n})",
            iid.m_required.ceil(),
            mixed.m_required.ceil()
        );
    }
    Ok(())
}
