//! Empirical measures of visit sequences and their convergence to a target.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityGrid;
use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::rng::derive_seed;

/// Normalized histogram of a visit sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub dims: GridDims,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl EmpiricalMeasure {
    pub fn mass(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    pub fn to_density(&self) -> DensityGrid {
        DensityGrid::from_weights(
            self.dims.clone(),
            self.counts.iter().map(|&c| c as f64).collect(),
        )
        .expect("nonempty histogram")
    }
}

pub fn empirical_measure(visits: &[usize], dims: &GridDims) -> Result<EmpiricalMeasure> {
    if visits.is_empty() {
        return Err(VdsError::InvalidArgument("empty visit sequence".into()));
    }
    let mut counts = vec![0u64; dims.len()];
    for &i in visits {
        dims.check_index(i)?;
        counts[i] += 1;
    }
    Ok(EmpiricalMeasure {
        dims: dims.clone(),
        counts,
        total: visits.len() as u64,
    })
}

/// `(1/2) Σ |p_i - q_i|`.
pub fn tv_distance(p: &DensityGrid, q: &DensityGrid) -> Result<f64> {
    if p.dims() != q.dims() {
        return Err(VdsError::InvalidArgument(format!(
            "densities on {:?} and {:?}",
            p.dims().dims(),
            q.dims().dims()
        )));
    }
    Ok(0.5
        * p.mass()
            .iter()
            .zip(q.mass())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean_tv: f64,
    pub std_tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Mean TV strictly decreasing along the rows.
    pub monotone_decreasing: bool,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,mean_tv,std_tv\n");
        for r in &self.rows {
            writeln!(out, "{},{:e},{:e}", r.n, r.mean_tv, r.std_tv).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// TV between `p` and the empirical measure of `process(N, seed)` for each
/// `N` in `sizes`, averaged over `trials` independently seeded runs.
pub fn vds_convergence_report<F>(
    process: F,
    p: &DensityGrid,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ConvergenceReport>
where
    F: Fn(usize, u64) -> Result<Vec<usize>> + Sync,
{
    if trials == 0 {
        return Err(VdsError::InvalidArgument("trials must be >= 1".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(VdsError::InvalidArgument("sizes must be increasing".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for (k, &n) in sizes.iter().enumerate() {
        let tvs: Vec<f64> = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let visits = process(n, derive_seed(derive_seed(seed, k as u64), t))?;
                tv_distance(&empirical_measure(&visits, p.dims())?.to_density(), p)
            })
            .collect::<Result<_>>()?;
        let mean = tvs.iter().sum::<f64>() / trials as f64;
        let var = if trials > 1 {
            tvs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials - 1) as f64
        } else {
            0.0
        };
        rows.push(ConvergenceRow {
            n,
            mean_tv: mean,
            std_tv: var.sqrt(),
        });
    }
    let monotone_decreasing = rows.windows(2).all(|w| w[1].mean_tv < w[0].mean_tv);
    Ok(ConvergenceReport {
        rows,
        monotone_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::polynomial_density;
    use crate::sampler_iid::draw_iid;
    use crate::sampler_markov::{metropolis_kernel, mix_with_jumps, run_chain, Neighborhood};
    use crate::scheme::Stop;

    fn dims(d: &[usize]) -> GridDims {
        GridDims::new(d.to_vec()).unwrap()
    }

    #[test]
    fn simple_measures() {
        let d = dims(&[4]);
        assert_eq!(
            empirical_measure(&[2, 2, 2], &d).unwrap().mass(),
            vec![0.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(
            empirical_measure(&[0, 1, 2, 3], &d).unwrap().mass(),
            vec![0.25; 4]
        );
        assert!(empirical_measure(&[], &d).is_err());
        assert!(empirical_measure(&[4], &d).is_err());
    }

    #[test]
    fn concatenation_is_additive() {
        let d = dims(&[8]);
        let (a, b) = (vec![1, 2, 2, 7], vec![0, 2, 5]);
        let joined: Vec<usize> = a.iter().chain(&b).copied().collect();
        let (ma, mb, mj) = (
            empirical_measure(&a, &d).unwrap(),
            empirical_measure(&b, &d).unwrap(),
            empirical_measure(&joined, &d).unwrap(),
        );
        for i in 0..8 {
            assert_eq!(mj.counts[i], ma.counts[i] + mb.counts[i]);
            let lhs = mj.mass()[i] * 7.0;
            let rhs = ma.mass()[i] * 4.0 + mb.mass()[i] * 3.0;
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn tv_examples() {
        let d = dims(&[2]);
        let a = DensityGrid::point_mass(d.clone(), 0).unwrap();
        let b = DensityGrid::point_mass(d.clone(), 1).unwrap();
        let h = DensityGrid::uniform(d.clone());
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(tv_distance(&h, &a).unwrap(), 0.5);
        assert!(tv_distance(&a, &DensityGrid::uniform(dims(&[4]))).is_err());
    }

    #[test]
    fn iid_rate_is_root_n() {
        let p = polynomial_density(&dims(&[8, 8]), 1.0).unwrap();
        let report = vds_convergence_report(
            |n, seed| Ok(draw_iid(&p, Stop::Draws(n), seed)?.draw_log),
            &p,
            &[1000, 4000],
            200,
            3,
        )
        .unwrap();
        let ratio = report.rows[0].mean_tv / report.rows[1].mean_tv;
        assert!((1.6..=2.4).contains(&ratio), "{report:?}");
        assert!(report.monotone_decreasing);
        assert!(report.to_csv().starts_with("N,mean_tv,std_tv\n1000,"));
    }

    #[test]
    fn full_sweep_is_exact() {
        let d = dims(&[4, 4]);
        let u = DensityGrid::uniform(d.clone());
        let report = vds_convergence_report(
            |n, _| Ok((0..n).map(|i| i % 16).collect()),
            &u,
            &[16, 48],
            2,
            0,
        )
        .unwrap();
        assert!(report.rows.iter().all(|r| r.mean_tv == 0.0));
    }

    #[test]
    fn jumps_speed_up_convergence() {
        let p = polynomial_density(&dims(&[16, 16]), 2.0).unwrap();
        let local = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false }).unwrap();
        let tv_for = |alpha: f64| {
            let k = mix_with_jumps(&local, alpha).unwrap();
            vds_convergence_report(
                |n, seed| Ok(run_chain(&k, Stop::Draws(n), seed)?.draw_log),
                &p,
                &[2000],
                40,
                5,
            )
            .unwrap()
            .rows[0]
                .mean_tv
        };
        assert!(tv_for(0.001) > tv_for(0.1));
    }
}
