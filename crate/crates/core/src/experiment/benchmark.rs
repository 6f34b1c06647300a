use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdsError};
use crate::grid::RealGrid;
use crate::reconstruct::{douglas_rachford, psnr, ReconstructionConfig, ReconstructionResult};
use crate::rng::derive_seed;
use crate::scheme::SamplingScheme;
use crate::transforms::AcquisitionModel;

use super::config::ExperimentConfig;
use super::phantom::load_phantom;
use super::schemes::PreparedScheme;

/// Seed of trial `trial` of the scheme at position `scheme`:
/// `derive_seed(derive_seed(master, scheme), trial)`.
pub fn trial_seed(master: u64, scheme: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(master, scheme as u64), trial as u64)
}

/// `y = (F x)_Ω` in the order of `omega`.
pub fn measure(
    model: &AcquisitionModel,
    image: &RealGrid,
    omega: &[usize],
) -> Result<Vec<Complex64>> {
    let z = model.analyze(&image.to_complex().data)?;
    let full = model.apply(&z)?;
    omega
        .iter()
        .map(|&i| {
            full.get(i).copied().ok_or(VdsError::IndexOutOfRange {
                index: i,
                n: full.len(),
            })
        })
        .collect()
}

/// Reconstructs `image` from its samples on `scheme` and scores the modulus
/// of the result.
pub fn reconstruct_and_score(
    model: &AcquisitionModel,
    image: &RealGrid,
    scheme: &SamplingScheme,
    config: &ReconstructionConfig,
) -> Result<(ReconstructionResult, f64)> {
    let y = measure(model, image, &scheme.omega)?;
    let result = douglas_rachford(model, &scheme.omega, &y, config)?;
    let modulus: Vec<f64> = result.image.iter().map(|v| v.norm()).collect();
    let score = psnr(&image.data, &modulus)?;
    Ok((result, score))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub scheme: String,
    pub trials: usize,
    pub mean_psnr: f64,
    pub std_psnr: f64,
    pub max_psnr: f64,
    /// Trials whose reconstruction met both tolerances.
    pub converged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub rows: Vec<BenchmarkRow>,
}

impl BenchmarkTable {
    pub fn row(&self, scheme: &str) -> Option<&BenchmarkRow> {
        self.rows.iter().find(|r| r.scheme == scheme)
    }

    /// Fixed six-decimal CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,trials,mean_psnr,std_psnr,max_psnr,converged\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{}",
                r.scheme, r.trials, r.mean_psnr, r.std_psnr, r.max_psnr, r.converged
            )
            .unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("scheme,trials,mean_psnr,std_psnr,max_psnr,converged") {
            return Err(VdsError::Format("unexpected benchmark CSV header".into()));
        }
        let bad = |line: &str| VdsError::Format(format!("bad benchmark row {line:?}"));
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(line));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(line));
            rows.push(BenchmarkRow {
                scheme: f[0].to_string(),
                trials: int(f[1])?,
                mean_psnr: num(f[2])?,
                std_psnr: num(f[3])?,
                max_psnr: num(f[4])?,
                converged: int(f[5])?,
            });
        }
        Ok(Self { rows })
    }
}

/// Mean, sample standard deviation and max. Infinite scores (exact
/// reconstructions) give an infinite mean and max and a zero spread when
/// every trial is exact.
fn summarize(scores: &[f64]) -> (f64, f64, f64) {
    let n = scores.len() as f64;
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if scores.iter().all(|s| s.is_infinite()) {
        return (f64::INFINITY, 0.0, f64::INFINITY);
    }
    let mean = scores.iter().sum::<f64>() / n;
    let std = if scores.len() > 1 && mean.is_finite() {
        (scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std, max)
}

/// Monte Carlo PSNR table: `trials` calibrated realizations of every scheme,
/// each reconstructed from noiseless samples of the phantom.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchmarkTable> {
    if cfg.schemes.is_empty() {
        return Err(VdsError::Config("no schemes to benchmark".into()));
    }
    let model = cfg.model()?;
    let phantom = load_phantom(&cfg.phantom, &cfg.dims)?;
    let mut rows = Vec::with_capacity(cfg.schemes.len());
    for (k, spec) in cfg.schemes.iter().enumerate() {
        let prepared = PreparedScheme::new(spec, cfg, &model)?;
        let outcomes: Vec<(f64, bool)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let scheme = prepared.draw(trial_seed(cfg.seed, k, t))?;
                let (result, score) =
                    reconstruct_and_score(&model, &phantom, &scheme, &cfg.reconstruction)?;
                Ok((score, result.converged))
            })
            .collect::<Result<_>>()?;
        let scores: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let (mean_psnr, std_psnr, max_psnr) = summarize(&scores);
        rows.push(BenchmarkRow {
            scheme: spec.name.clone(),
            trials: cfg.trials,
            mean_psnr,
            std_psnr,
            max_psnr,
            converged: outcomes.iter().filter(|o| o.1).count(),
        });
    }
    Ok(BenchmarkTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let (m, s, x) = summarize(&[1.0, 2.0, 3.0]);
        assert_eq!((m, x), (2.0, 3.0));
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(
            summarize(&[f64::INFINITY; 2]),
            (f64::INFINITY, 0.0, f64::INFINITY)
        );
    }

    #[test]
    fn csv_round_trip() {
        let table = BenchmarkTable {
            rows: vec![
                BenchmarkRow {
                    scheme: "tsp".into(),
                    trials: 3,
                    mean_psnr: 31.25,
                    std_psnr: 0.5,
                    max_psnr: 32.0,
                    converged: 2,
                },
                BenchmarkRow {
                    scheme: "full".into(),
                    trials: 1,
                    mean_psnr: f64::INFINITY,
                    std_psnr: 0.0,
                    max_psnr: f64::INFINITY,
                    converged: 1,
                },
            ],
        };
        let csv = table.to_csv();
        assert!(csv.contains("full,1,inf,0.000000,inf,1"));
        assert_eq!(BenchmarkTable::from_csv(&csv).unwrap(), table);
        assert!(BenchmarkTable::from_csv("a,b\n").is_err());
    }
}
