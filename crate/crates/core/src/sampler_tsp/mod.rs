//! Continuous trajectories through random cities: the density correction
//! `p^{d/(d-1)}`, cell-jitter point drawing, heuristic TSP paths, occupation
//! measures and the BHH constant.

mod solver;
mod trajectory;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityGrid;
use crate::empirical::tv_distance;
use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampler_iid::DiscreteSampler;

pub use solver::Effort;
pub use trajectory::{
    nearest_index, occupation_measure, occupation_measure_on, parametrize_constant_speed,
    regrid_nearest, regrid_trajectory, sample_curve, OccupationMeasure, Trajectory,
};

/// Cities in `[0,1]^d`, flattened `d` coordinates per point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub d: usize,
    pub coords: Vec<f64>,
    /// Grid of the density the points were drawn from, if any.
    pub source: Option<GridDims>,
    pub seed: u64,
}

impl PointCloud {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 || !coords.len().is_multiple_of(d) || coords.len() < 2 * d {
            return Err(VdsError::InvalidArgument(format!(
                "need at least 2 points of dimension {d}, got {} coordinates",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(VdsError::InvalidArgument(format!(
                "coordinate {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            d,
            coords,
            source: None,
            seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }
}

/// `normalize(p^{d/(d-1)})`: the city density whose TSP curve has occupation
/// measure `p`.
pub fn target_to_initial_density(p: &DensityGrid, d: usize) -> Result<DensityGrid> {
    if !(2..=3).contains(&d) {
        return Err(VdsError::InvalidArgument(format!(
            "dimension must be 2 or 3, got {d}"
        )));
    }
    p.powered(d as f64 / (d as f64 - 1.0))
}

/// `normalize(q^{(d-1)/d})`: the limit occupation of TSP curves through
/// cities drawn from `q`.
pub fn limit_density(q: &DensityGrid, d: usize) -> Result<DensityGrid> {
    if !(2..=3).contains(&d) {
        return Err(VdsError::InvalidArgument(format!(
            "dimension must be 2 or 3, got {d}"
        )));
    }
    q.powered((d as f64 - 1.0) / d as f64)
}

/// `count` points: a cell from `q`, then a uniform position inside it.
pub fn draw_points(q: &DensityGrid, count: usize, seed: u64) -> Result<PointCloud> {
    if count < 2 {
        return Err(VdsError::InvalidArgument(format!(
            "need at least 2 points, got {count}"
        )));
    }
    let dims = q.dims();
    let d = dims.rank();
    let sampler = DiscreteSampler::new(q);
    let mut rng = rng_from_seed(seed);
    let mut coords = Vec::with_capacity(count * d);
    for _ in 0..count {
        let cell = dims.unravel(sampler.sample(&mut rng));
        for (c, &side) in cell.iter().zip(dims.dims()) {
            coords.push((*c as f64 + rng.gen::<f64>()) / side as f64);
        }
    }
    Ok(PointCloud {
        d,
        coords,
        source: Some(dims.clone()),
        seed,
    })
}

/// `count` uniform points in `[0,1]^d`.
pub fn uniform_points(d: usize, count: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = rng_from_seed(seed);
    let coords = (0..count * d).map(|_| rng.gen::<f64>()).collect();
    let mut cloud = PointCloud::new(d, coords)?;
    cloud.seed = seed;
    Ok(cloud)
}

/// Open Hamiltonian path through every city.
pub fn solve_tsp(cloud: &PointCloud, effort: Effort) -> Result<Trajectory> {
    let order = tsp_order(cloud, effort)?;
    let mut vertices = Vec::with_capacity(cloud.coords.len());
    for &i in &order {
        vertices.extend_from_slice(cloud.point(i));
    }
    Trajectory::new(cloud.d, vertices)
}

/// Visiting order of [`solve_tsp`].
pub fn tsp_order(cloud: &PointCloud, effort: Effort) -> Result<Vec<usize>> {
    if cloud.len() < 2 {
        return Err(VdsError::InvalidArgument("need at least 2 cities".into()));
    }
    let order = solver::nearest_neighbor(cloud);
    Ok(match effort {
        Effort::NearestNeighbor => order,
        Effort::TwoOpt { max_passes } => solver::two_opt(cloud, order, max_passes, None),
    })
}

/// Path length after nearest-neighbour construction and after every
/// subsequent improvement stage.
pub fn improvement_trace(cloud: &PointCloud, max_passes: usize) -> Result<Vec<f64>> {
    if cloud.len() < 2 {
        return Err(VdsError::InvalidArgument("need at least 2 cities".into()));
    }
    let mut trace = Vec::new();
    solver::two_opt(
        cloud,
        solver::nearest_neighbor(cloud),
        max_passes,
        Some(&mut trace),
    );
    Ok(trace)
}

/// Length of the open path visiting `order`.
pub fn path_length(cloud: &PointCloud, order: &[usize]) -> f64 {
    solver::path_length(cloud, order)
}

/// Least-squares slope of `ln y` against `ln x` over pairs with both positive.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitDensityRow {
    pub points: usize,
    pub trials: usize,
    /// TV between the mean occupation and the target `p`.
    pub tv_to_target: f64,
    /// TV between the mean occupation and `normalize(q^{(d-1)/d})`.
    pub tv_to_limit: f64,
    /// Log-log slope of mean occupation against the city density `q`.
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitDensityReport {
    pub corrected: bool,
    pub rows: Vec<LimitDensityRow>,
}

/// Mean occupation measure of TSP curves on the grid of `p`, over `trials`
/// clouds per size in `sizes`. With `corrected`, cities are drawn from
/// `p^{d/(d-1)}`; otherwise from `p` itself.
pub fn verify_limit_density(
    p: &DensityGrid,
    sizes: &[usize],
    trials: usize,
    corrected: bool,
    effort: Effort,
    seed: u64,
) -> Result<LimitDensityReport> {
    let d = p.dims().rank();
    let q = if corrected {
        target_to_initial_density(p, d)?
    } else {
        p.clone()
    };
    let limit = limit_density(&q, d)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &points in sizes {
        let mean = mean_occupation(&q, points, trials, effort, derive_seed(seed, points as u64))?;
        rows.push(LimitDensityRow {
            points,
            trials,
            tv_to_target: tv_distance(&mean, p)?,
            tv_to_limit: tv_distance(&mean, &limit)?,
            slope: loglog_slope(q.mass(), mean.mass()),
        });
    }
    Ok(LimitDensityReport { corrected, rows })
}

/// Mean over trials of the occupation measure (on `q`'s grid) of TSP paths
/// through `points` cities drawn from `q`.
pub fn mean_occupation(
    q: &DensityGrid,
    points: usize,
    trials: usize,
    effort: Effort,
    seed: u64,
) -> Result<DensityGrid> {
    if trials == 0 {
        return Err(VdsError::InvalidArgument("trials must be >= 1".into()));
    }
    let dims = q.dims().clone();
    let measures: Vec<DensityGrid> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let cloud = draw_points(q, points, derive_seed(seed, t))?;
            let traj = solve_tsp(&cloud, effort)?;
            Ok(occupation_measure_on(&traj, &dims)?.mass)
        })
        .collect::<Result<_>>()?;
    let mut acc = vec![0.0; dims.len()];
    for m in &measures {
        acc.iter_mut().zip(m.mass()).for_each(|(a, v)| *a += v);
    }
    DensityGrid::from_weights(dims, acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BhhEstimate {
    pub d: usize,
    pub points: usize,
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
}

/// Mean of `T(Y_N) / N^{(d-1)/d}` over uniform clouds `Y_N` in `[0,1]^d`.
pub fn estimate_bhh_constant(
    d: usize,
    points: usize,
    trials: usize,
    effort: Effort,
    seed: u64,
) -> Result<BhhEstimate> {
    if !(2..=3).contains(&d) {
        return Err(VdsError::InvalidArgument(format!(
            "dimension must be 2 or 3, got {d}"
        )));
    }
    if trials == 0 {
        return Err(VdsError::InvalidArgument("trials must be >= 1".into()));
    }
    let scale = (points as f64).powf((d as f64 - 1.0) / d as f64);
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let cloud = uniform_points(d, points, derive_seed(seed, t))?;
            Ok(solve_tsp(&cloud, effort)?.total_length / scale)
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / trials as f64;
    let var =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials.max(2) - 1) as f64;
    Ok(BhhEstimate {
        d,
        points,
        trials,
        mean,
        std: var.sqrt(),
    })
}
