//! TV between the empirical measure of a visit sequence and its target, for
//! iid draws and for random walks with few and many jumps.
//!
//! cargo run --release -p vds --example empirical_convergence

use vds::density::polynomial_density;
use vds::empirical::vds_convergence_report;
use vds::grid::GridDims;
use vds::sampler_iid::draw_iid;
use vds::sampler_markov::{metropolis_kernel, mix_with_jumps, run_chain, Neighborhood};
use vds::scheme::Stop;

fn main() -> vds::Result<()> {
    let dims = GridDims::new(vec![16, 16])?;
    let p = polynomial_density(&dims, 2.0)?;
    let sizes = [1000, 4000, 16000, 64000];

    let iid = vds_convergence_report(
        |n, s| Ok(draw_iid(&p, Stop::Draws(n), s)?.draw_log),
        &p,
        &sizes,
        20,
        1,
    )?;
    println!("iid\n{}", iid.to_csv());

    let local = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false })?;
    for alpha in [0.001, 0.1] {
        let k = mix_with_jumps(&local, alpha)?;
        let report = vds_convergence_report(
            |n, s| Ok(run_chain(&k, Stop::Draws(n), s)?.draw_log),
            &p,
            &sizes,
            20,
            1,
        )?;
        println!("markov, alpha = {alpha}\n{}", report.to_csv());
    }
    Ok(())
}
