//! Polyline trajectories in `[0,1]^d`: arc-length parametrization, curve
//! sampling, exact occupation measures and nearest-cell regridding.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::density::DensityGrid;
use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::scheme::{Provenance, SamplingScheme};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub d: usize,
    /// Flattened vertex coordinates, `d` per vertex.
    pub vertices: Vec<f64>,
    pub cumulative_length: Vec<f64>,
    pub total_length: f64,
}

impl Trajectory {
    /// Builds a trajectory from flattened vertices. Consecutive repeated
    /// vertices are dropped.
    pub fn new(d: usize, vertices: Vec<f64>) -> Result<Self> {
        if d == 0 || !vertices.len().is_multiple_of(d) {
            return Err(VdsError::InvalidArgument(format!(
                "{} coordinates do not form {d}-dimensional points",
                vertices.len()
            )));
        }
        let mut kept: Vec<f64> = Vec::with_capacity(vertices.len());
        let mut cumulative = Vec::with_capacity(vertices.len() / d);
        for v in vertices.chunks(d) {
            if let Some(last) = kept.len().checked_sub(d).map(|s| &kept[s..]) {
                let len = segment_length(last, v);
                if len == 0.0 {
                    continue;
                }
                let prev = *cumulative.last().unwrap();
                cumulative.push(prev + len);
            } else {
                cumulative.push(0.0);
            }
            kept.extend_from_slice(v);
        }
        if cumulative.len() < 2 {
            return Err(VdsError::InvalidArgument(
                "trajectory has zero length".into(),
            ));
        }
        let total_length = *cumulative.last().unwrap();
        Ok(Self {
            d,
            vertices: kept,
            cumulative_length: cumulative,
            total_length,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.cumulative_length.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.d..(i + 1) * self.d]
    }

    /// CSV with header `t,x,y[,z]`; `t` is the normalized arc length.
    pub fn to_csv(&self) -> String {
        let names = ["x", "y", "z"];
        let mut out = String::from("t");
        for a in 0..self.d {
            out.push(',');
            out.push_str(names.get(a).copied().unwrap_or("w"));
        }
        out.push('\n');
        for i in 0..self.vertex_count() {
            write!(out, "{:e}", self.cumulative_length[i] / self.total_length).unwrap();
            for &c in self.vertex(i) {
                write!(out, ",{c:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| VdsError::Format("empty trajectory CSV".into()))?;
        let d = header.split(',').count() - 1;
        if !header.starts_with("t,") || d == 0 {
            return Err(VdsError::Format(format!(
                "bad trajectory header {header:?}"
            )));
        }
        let mut vertices = Vec::new();
        for (no, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(VdsError::Format(format!(
                    "line {}: expected {} fields",
                    no + 2,
                    d + 1
                )));
            }
            for f in &fields[1..] {
                vertices.push(
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| VdsError::Format(format!("line {}: {e}", no + 2)))?,
                );
            }
        }
        Self::new(d, vertices)
    }
}

fn segment_length(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Point at normalized arc length `t ∈ [0, 1]`.
pub fn parametrize_constant_speed(traj: &Trajectory, t: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(VdsError::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    Ok(point_at(traj, t * traj.total_length))
}

fn point_at(traj: &Trajectory, s: f64) -> Vec<f64> {
    let cum = &traj.cumulative_length;
    let seg = cum.partition_point(|&c| c <= s).clamp(1, cum.len() - 1) - 1;
    let (a, b) = (traj.vertex(seg), traj.vertex(seg + 1));
    let u = ((s - cum[seg]) / (cum[seg + 1] - cum[seg])).clamp(0.0, 1.0);
    a.iter().zip(b).map(|(x, y)| x + u * (y - x)).collect()
}

/// Points at equal arc-length spacing (at most `step`), both endpoints
/// included. Flattened, `d` coordinates per point.
pub fn sample_curve(traj: &Trajectory, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(VdsError::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let count = (traj.total_length / step).ceil().max(1.0) as usize;
    let h = traj.total_length / count as f64;
    let mut out = Vec::with_capacity((count + 1) * traj.d);
    for k in 0..=count {
        let s = if k == count {
            traj.total_length
        } else {
            k as f64 * h
        };
        out.extend(point_at(traj, s));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationMeasure {
    pub mass: DensityGrid,
}

/// Cell of `x` on an axis with `side` cells covering `[j/side, (j+1)/side)`.
fn cell_coord(x: f64, side: usize) -> usize {
    ((x * side as f64).floor().max(0.0) as usize).min(side - 1)
}

/// Relative curve length inside each cell of the `h^d` grid.
pub fn occupation_measure(traj: &Trajectory, h: usize) -> Result<OccupationMeasure> {
    occupation_measure_on(traj, &GridDims::cube(h, traj.d)?)
}

/// Relative curve length inside each cell of `dims`, by clipping every
/// segment against the cell boundaries.
pub fn occupation_measure_on(traj: &Trajectory, dims: &GridDims) -> Result<OccupationMeasure> {
    if dims.rank() != traj.d {
        return Err(VdsError::InvalidArgument(format!(
            "{}-dimensional trajectory on a rank-{} grid",
            traj.d,
            dims.rank()
        )));
    }
    let shape = dims.dims();
    let mut lengths = vec![0.0; dims.len()];
    let mut cuts = Vec::new();
    let mut coords = vec![0usize; traj.d];
    for seg in 0..traj.vertex_count() - 1 {
        let (a, b) = (traj.vertex(seg), traj.vertex(seg + 1));
        let len = traj.cumulative_length[seg + 1] - traj.cumulative_length[seg];
        cuts.clear();
        cuts.push(0.0);
        cuts.push(1.0);
        for axis in 0..traj.d {
            let (x0, x1) = (a[axis], b[axis]);
            if x0 == x1 {
                continue;
            }
            let side = shape[axis] as f64;
            let (lo, hi) = (x0.min(x1) * side, x0.max(x1) * side);
            let mut k = lo.floor() + 1.0;
            while k < hi {
                let t = (k / side - x0) / (x1 - x0);
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
                k += 1.0;
            }
        }
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            for axis in 0..traj.d {
                coords[axis] = cell_coord(a[axis] + mid * (b[axis] - a[axis]), shape[axis]);
            }
            lengths[dims.ravel(&coords)] += len * (w[1] - w[0]);
        }
    }
    Ok(OccupationMeasure {
        mass: DensityGrid::from_weights(dims.clone(), lengths)?,
    })
}

/// Nearest grid index of a point: cell centres sit at `(j + 1/2)/side`, and a
/// point equidistant from two centres goes to the lower one.
pub fn nearest_index(x: &[f64], dims: &GridDims) -> usize {
    let coords: Vec<usize> = x
        .iter()
        .zip(dims.dims())
        .map(|(&v, &side)| ((v * side as f64 - 1.0).ceil().max(0.0) as usize).min(side - 1))
        .collect();
    dims.ravel(&coords)
}

/// Rounds each sample to its nearest grid index, keeping visit order.
pub fn regrid_nearest(
    samples: &[f64],
    dims: &GridDims,
    seed: u64,
    provenance: Provenance,
) -> Result<SamplingScheme> {
    let d = dims.rank();
    if !samples.len().is_multiple_of(d) {
        return Err(VdsError::InvalidArgument(
            "sample coordinates do not match grid rank".into(),
        ));
    }
    if let Some(bad) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(VdsError::InvalidArgument(format!(
            "sample coordinate {bad} outside [0, 1]"
        )));
    }
    let draws = samples.chunks(d).map(|x| nearest_index(x, dims)).collect();
    SamplingScheme::from_draws(dims.clone(), vec![], draws, seed, provenance)
}

/// Samples the curve every half pixel and regrids.
pub fn regrid_trajectory(
    traj: &Trajectory,
    dims: &GridDims,
    seed: u64,
    provenance: Provenance,
) -> Result<SamplingScheme> {
    let step = 0.5 / dims.max_dim() as f64;
    let samples = sample_curve(traj, step)?;
    Ok(regrid_nearest(&samples, dims, seed, provenance)?.with_trajectory(traj.clone()))
}
