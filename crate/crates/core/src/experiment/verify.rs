use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::density::{k_value, optimal_density, polynomial_density, DensityGrid};
use crate::empirical::vds_convergence_report;
use crate::error::Result;
use crate::grid::GridDims;
use crate::rng::derive_seed;
use crate::sampler_iid::draw_iid;
use crate::sampler_markov::{
    juditsky_certificate, metropolis_kernel, verify_cheeger_bound, verify_weyl, Neighborhood,
};
use crate::sampler_tsp::{estimate_bhh_constant, verify_limit_density, Effort};
use crate::scheme::Stop;
use crate::transforms::{AcquisitionModel, WaveletSpec};

use super::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check(name: &str, passed: bool, details: serde_json::Value) -> Check {
    Check {
        name: name.into(),
        passed,
        details,
    }
}

fn square(side: usize) -> GridDims {
    GridDims::cube(side, 2).expect("power-of-two side")
}

/// Quick versions of the invariant suites, on small fixed grids:
/// iid convergence rate, Metropolis residuals, the Cheeger and Weyl
/// properties, the TSP occupation exponent, BHH stabilization, the
/// full-sampling certificate, and optimality of `π` for the configured
/// wavelet.
pub fn run_verification(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let seed = cfg.seed;
    let p16 = polynomial_density(&square(16), 2.0)?;
    let mut checks = Vec::new();

    let report = vds_convergence_report(
        |n, s| Ok(draw_iid(&p16, Stop::Draws(n), s)?.draw_log),
        &p16,
        &[1000, 4000, 16000],
        50,
        derive_seed(seed, 1),
    )?;
    let ratio = report.rows[0].mean_tv / report.rows[2].mean_tv;
    checks.push(check(
        "iid_convergence",
        report.monotone_decreasing && (3.0..=5.0).contains(&ratio),
        json!({ "rows": report.rows, "tv_ratio_16x": ratio }),
    ));

    let kernel = metropolis_kernel(&p16, Neighborhood::VonNeumann { periodic: false })?;
    let (db, st, rs) = (
        kernel.detailed_balance_residual(),
        kernel.stationarity_residual(),
        kernel.row_sum_residual(),
    );
    checks.push(check(
        "metropolis_residuals",
        db < 1e-12 && st < 1e-12 && rs < 1e-12,
        json!({ "detailed_balance": db, "stationarity": st, "row_sum": rs }),
    ));

    let cheeger = [
        verify_cheeger_bound(&square(8))?,
        verify_cheeger_bound(&square(16))?,
    ];
    checks.push(check(
        "cheeger_bound",
        cheeger.iter().all(|c| c.holds),
        serde_json::to_value(&cheeger)?,
    ));

    let weyl = verify_weyl(&kernel, &[0.01, 0.1, 0.5])?;
    checks.push(check(
        "weyl",
        weyl.iter().all(|w| w.holds),
        serde_json::to_value(&weyl)?,
    ));

    let tsp = verify_limit_density(
        &p16,
        &[2000],
        20,
        false,
        Effort::default(),
        derive_seed(seed, 2),
    )?;
    let slope = tsp.rows[0].slope;
    checks.push(check(
        "tsp_occupation_exponent",
        (slope - 0.5).abs() <= 0.05,
        serde_json::to_value(&tsp)?,
    ));

    let small = estimate_bhh_constant(2, 1000, 5, Effort::default(), derive_seed(seed, 3))?;
    let large = estimate_bhh_constant(2, 4000, 5, Effort::default(), derive_seed(seed, 4))?;
    let spread = (small.mean - large.mean).abs() / large.mean;
    checks.push(check(
        "bhh_stabilization",
        spread < 0.1,
        json!({ "estimates": [small, large], "relative_spread": spread }),
    ));

    let model16 = AcquisitionModel::new(square(16), WaveletSpec::haar(4))?;
    let pi16 = optimal_density(&model16);
    let full: Vec<usize> = (0..model16.n()).collect();
    let uniform = DensityGrid::uniform(square(16));
    let exact = juditsky_certificate(&model16, &uniform, &full, 8)?;
    let mut residuals = Vec::new();
    for (k, m) in [256usize, 1024, 4096].into_iter().enumerate() {
        let draws = draw_iid(&pi16, Stop::Draws(m), derive_seed(seed, 10 + k as u64))?.draw_log;
        residuals.push(juditsky_certificate(&model16, &pi16, &draws, 8)?);
    }
    checks.push(check(
        "certificate",
        exact.infnorm_residual < 1e-12
            && residuals
                .windows(2)
                .all(|w| w[1].infnorm_residual < w[0].infnorm_residual),
        json!({ "full_sampling": exact, "iid": residuals }),
    ));

    let model = cfg.model()?;
    let pi = optimal_density(&model);
    let k = k_value(&model, &pi)?;
    let sum: f64 = model.row_infnorms.data.iter().map(|a| a * a).sum();
    let k_uniform = k_value(&model, &DensityGrid::uniform(cfg.dims.clone()))?;
    checks.push(check(
        "optimal_density",
        (k - sum).abs() <= 1e-12 * sum.max(1.0) && k <= k_uniform,
        json!({ "k_optimal": k, "sum_row_infnorms_sq": sum, "k_uniform": k_uniform }),
    ));

    Ok(VerificationReport { seed, checks })
}
