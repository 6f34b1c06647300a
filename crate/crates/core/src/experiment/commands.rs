use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::density::{bound_iid, bound_mixed, deterministic_set, k_value, k_value_excluding};
use crate::error::{Result, VdsError};
use crate::grid::RealGrid;

use super::benchmark::{reconstruct_and_score, run_benchmark, trial_seed};
use super::config::ExperimentConfig;
use super::phantom::load_phantom;
use super::schemes::PreparedScheme;
use super::verify::run_verification;

/// Command-line overrides applied on top of a loaded config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        self
    }
}

fn out_dir(cfg: &ExperimentConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(&cfg.output_dir)
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents)?;
    written.push(path);
    Ok(())
}

/// `density.vdsg`, `row_infnorms.vdsg` and `density.json` (K and, with
/// `[bounds]`, the iid and mixed sample-count bounds).
pub fn cmd_density(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let model = cfg.model()?;
    let p = cfg.density.build(&cfg.dims, Some(&model))?;
    let dir = out_dir(cfg)?;
    let mut written = Vec::new();
    let path = dir.join("density.vdsg");
    p.to_grid().save(&path)?;
    written.push(path);
    let path = dir.join("row_infnorms.vdsg");
    model.row_infnorms.save(&path)?;
    written.push(path);

    let k = k_value(&model, &p)?;
    let mut meta = json!({ "dims": cfg.dims.dims(), "k": k });
    if let Some(b) = &cfg.bounds {
        let n = cfg.dims.len();
        let m1 = (cfg.m1_fraction * cfg.target_m() as f64).round() as usize;
        let omega1 = deterministic_set(&model, m1)?;
        let k_rest = k_value_excluding(&model, &p, &omega1)?;
        meta["bound_iid"] = serde_json::to_value(bound_iid(n, k, b.sparsity, b.eta)?)?;
        meta["bound_mixed"] = serde_json::to_value(bound_mixed(n, k_rest, m1, b.sparsity, b.eta)?)?;
    }
    write(
        dir.join("density.json"),
        serde_json::to_string_pretty(&meta)?,
        &mut written,
    )?;
    Ok(written)
}

/// One realization per scheme (trial 0): `<name>.scheme.json`,
/// `<name>.pbm` and, for curves, `<name>.trajectory.csv`.
pub fn cmd_scheme(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    if cfg.schemes.is_empty() {
        return Err(VdsError::Config("no schemes configured".into()));
    }
    let model = cfg.model()?;
    let dir = out_dir(cfg)?;
    let mut written = Vec::new();
    for (k, spec) in cfg.schemes.iter().enumerate() {
        let scheme = PreparedScheme::new(spec, cfg, &model)?.draw(trial_seed(cfg.seed, k, 0))?;
        write(
            dir.join(format!("{}.scheme.json", spec.name)),
            scheme.to_json()?,
            &mut written,
        )?;
        write(
            dir.join(format!("{}.pbm", spec.name)),
            scheme.to_pbm(),
            &mut written,
        )?;
        if let Some(traj) = &scheme.trajectory {
            write(
                dir.join(format!("{}.trajectory.csv", spec.name)),
                traj.to_csv(),
                &mut written,
            )?;
        }
    }
    Ok(written)
}

/// Reconstructs the phantom from trial 0 of every scheme:
/// `<name>.recon.vdsg` (modulus image) and `<name>.metrics.json`. Fails with
/// `NotConverged` after writing everything if any run missed a tolerance.
pub fn cmd_reconstruct(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    if cfg.schemes.is_empty() {
        return Err(VdsError::Config("no schemes configured".into()));
    }
    let model = cfg.model()?;
    let phantom = load_phantom(&cfg.phantom, &cfg.dims)?;
    let dir = out_dir(cfg)?;
    let mut written = Vec::new();
    let path = dir.join("phantom.vdsg");
    phantom.save(&path)?;
    written.push(path);
    let mut failure = None;
    for (k, spec) in cfg.schemes.iter().enumerate() {
        let scheme = PreparedScheme::new(spec, cfg, &model)?.draw(trial_seed(cfg.seed, k, 0))?;
        let (result, score) =
            reconstruct_and_score(&model, &phantom, &scheme, &cfg.reconstruction)?;
        let image = RealGrid::new(
            cfg.dims.clone(),
            result.image.iter().map(|v| v.norm()).collect(),
        )?;
        let path = dir.join(format!("{}.recon.vdsg", spec.name));
        image.save(&path)?;
        written.push(path);
        let meta = json!({
            "scheme": spec.name,
            "m": scheme.m(),
            "psnr": if score.is_finite() { json!(score) } else { json!("inf") },
            "iterations": result.iterations,
            "converged": result.converged,
            "feasibility_residual": result.feasibility_residual,
            "fixed_point_residual": result.fixed_point_residual,
            "l1_objective": result.l1_objective,
        });
        write(
            dir.join(format!("{}.metrics.json", spec.name)),
            serde_json::to_string_pretty(&meta)?,
            &mut written,
        )?;
        if !result.converged && failure.is_none() {
            failure = Some(VdsError::NotConverged {
                iterations: result.iterations,
                residual: result.fixed_point_residual.max(result.feasibility_residual),
            });
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

/// `verify.json`; returns the report alongside the path.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<(PathBuf, bool)> {
    let report = run_verification(cfg)?;
    let path = out_dir(cfg)?.join("verify.json");
    fs::write(&path, report.to_json()?)?;
    Ok((path, report.all_passed()))
}

/// `benchmark.csv`.
pub fn cmd_benchmark(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let table = run_benchmark(cfg)?;
    let path = out_dir(cfg)?.join("benchmark.csv");
    fs::write(&path, table.to_csv())?;
    Ok(path)
}
