//! Metropolis random walk on the grid: kernel residuals, spectral gap with
//! and without jumps, the Cheeger bound on the torus, and a chain run.
//!
//! cargo run --release -p vds --example markov_chain

use vds::density::polynomial_density;
use vds::empirical::{empirical_measure, tv_distance};
use vds::grid::GridDims;
use vds::sampler_markov::{
    metropolis_kernel, mix_with_jumps, run_chain, spectral_gap, verify_cheeger_bound, verify_weyl,
    Neighborhood,
};
use vds::scheme::Stop;

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![16, 16])?;
    let p = polynomial_density(&dims, 2.0)?;
    let local = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false })?;
    println!(
        "detailed balance {:.1e}, stationarity {:.1e}",
        local.detailed_balance_residual(),
        local.stationarity_residual()
    );

    let gap = spectral_gap(&local)?;
    println!(
        "local walk: lambda2 = {:.6}, gap = {:.3e} ({:?})",
        gap.lambda2, gap.gap, gap.method
    );
    for w in verify_weyl(&local, &[0.01, 0.1, 0.5])? {
        println!(
            "  alpha = {:<4}: gap {:.4} >= alpha: {}",
            w.alpha, w.gap, w.holds
        );
    }

    for side in [8, 16] {
        let c = verify_cheeger_bound(&GridDims::new(vec![side, side])?)?;
        println!(
            "torus {side}x{side}: gap {:.5} <= bound {:.5}: {}",
            c.gap, c.bound, c.holds
        );
    }

    for alpha in [0.001, 0.1] {
        let k = mix_with_jumps(&local, alpha)?;
        let chain = run_chain(&k, Stop::Draws(200_000), 7)?;
        let tv = tv_distance(&empirical_measure(&chain.draw_log, &dims)?.to_density(), &p)?;
        println!(
            "alpha = {alpha}: 2e5 steps, {} distinct, TV to p = {tv:.4}",
            chain.m()
        );
    }
    Ok(())
}
