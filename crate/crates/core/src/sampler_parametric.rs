//! Closed-form baselines: the variable-density spiral, radial spokes and 3D
//! readout lines.
//!
//! Curves live in `[0,1]^d` with cell `j` of an axis covering
//! `[j/side, (j+1)/side)`. Everything is centred on the DC cell centre
//! `(side/2 + 1/2)/side`. Planar directions put `cos θ` on the last axis and
//! `sin θ` on the one before, so angle 0 is a horizontal line.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityGrid;
use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::rng::rng_from_seed;
use crate::sampler_iid::DiscreteSampler;
use crate::sampler_tsp::{regrid_nearest, sample_curve, Trajectory};
use crate::scheme::{Provenance, SamplingScheme};

/// Centre of the DC cell in unit coordinates.
pub fn dc_centre(dims: &GridDims) -> Vec<f64> {
    dims.dims()
        .iter()
        .map(|&s| (s / 2) as f64 / s as f64 + 0.5 / s as f64)
        .collect()
}

/// `r(t) = r0 r1 / (r1 - t (r1 - r0))`, swept over `turns` revolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiralSpec {
    pub r0: f64,
    pub r1: f64,
    pub turns: usize,
    pub samples_per_turn: usize,
}

impl SpiralSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0 < self.r1 && self.r1 <= 0.5) {
            return Err(VdsError::InvalidArgument(format!(
                "spiral radii need 0 < r0 < r1 <= 1/2, got r0 = {}, r1 = {}",
                self.r0, self.r1
            )));
        }
        if self.turns == 0 || self.samples_per_turn < 3 {
            return Err(VdsError::InvalidArgument(
                "spiral needs at least one turn and three samples per turn".into(),
            ));
        }
        Ok(())
    }

    pub fn radius(&self, t: f64) -> f64 {
        self.r0 * self.r1 / (self.r1 - t * (self.r1 - self.r0))
    }
}

/// Polyline through the centre, then along `s(θ) = r(θ/2πT)(cos θ, sin θ)`.
pub fn spiral_trajectory(spec: &SpiralSpec, centre: &[f64]) -> Result<Trajectory> {
    spec.validate()?;
    if centre.len() != 2 {
        return Err(VdsError::InvalidArgument("spiral centre must be 2D".into()));
    }
    let steps = spec.turns * spec.samples_per_turn;
    let mut vertices = Vec::with_capacity(2 * (steps + 2));
    vertices.extend_from_slice(centre);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let theta = 2.0 * PI * spec.turns as f64 * t;
        let r = spec.radius(t);
        vertices.push(centre[0] + r * theta.sin());
        vertices.push(centre[1] + r * theta.cos());
    }
    Trajectory::new(2, vertices)
}

/// Fraction of the spiral's length with radius in each bin `[edges[i],
/// edges[i+1])`, in the many-turn limit: `ln(b/a) / ln(r1/r0)` on the part
/// of the bin inside `[r0, r1]`.
pub fn spiral_radial_density(spec: &SpiralSpec, edges: &[f64]) -> Vec<f64> {
    let total = (spec.r1 / spec.r0).ln();
    edges
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].max(spec.r0), w[1].min(spec.r1));
            if b > a {
                (b / a).ln() / total
            } else {
                0.0
            }
        })
        .collect()
}

/// Fraction of the trajectory's length with distance to `centre` in each
/// bin, from arc-length sampling at `step`.
pub fn radial_occupation(
    traj: &Trajectory,
    centre: &[f64],
    edges: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let pts = sample_curve(traj, step)?;
    let d = traj.d;
    let pts: Vec<&[f64]> = pts.chunks(d).collect();
    let mut bins = vec![0.0; edges.len().saturating_sub(1)];
    for w in pts.windows(2) {
        let mid: Vec<f64> = w[0].iter().zip(w[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let len = w[0]
            .iter()
            .zip(w[1])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rho = mid
            .iter()
            .zip(centre)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt();
        let bin = edges.partition_point(|&e| e <= rho);
        if bin >= 1 && bin < edges.len() {
            bins[bin - 1] += len;
        }
    }
    let total: f64 = pts
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(w[1])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    Ok(bins.into_iter().map(|b| b / total).collect())
}

/// Regrids a curve with half-pixel sampling. Samples that leave the unit
/// cube by less than a pixel are pulled back onto it.
fn regrid_curve(
    traj: &Trajectory,
    dims: &GridDims,
    seed: u64,
    provenance: Provenance,
) -> Result<SamplingScheme> {
    let step = 0.5 / dims.max_dim() as f64;
    let samples: Vec<f64> = sample_curve(traj, step)?
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    Ok(regrid_nearest(&samples, dims, seed, provenance)?.with_trajectory(traj.clone()))
}

/// The spiral centred on DC, regridded.
pub fn spiral_scheme(dims: &GridDims, spec: &SpiralSpec) -> Result<SamplingScheme> {
    if dims.rank() != 2 {
        return Err(VdsError::InvalidArgument("spiral schemes are 2D".into()));
    }
    let traj = spiral_trajectory(spec, &dc_centre(dims))?;
    regrid_curve(&traj, dims, 0, Provenance::Spiral)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AngleRule {
    /// `θ_k = k π / spokes`.
    Uniform,
    /// Independent uniform angles in `[0, π)`.
    Random { seed: u64 },
}

pub fn spoke_angles(spokes: usize, rule: &AngleRule) -> Vec<f64> {
    match rule {
        AngleRule::Uniform => (0..spokes).map(|k| k as f64 * PI / spokes as f64).collect(),
        AngleRule::Random { seed } => {
            let mut rng = rng_from_seed(*seed);
            (0..spokes).map(|_| rng.gen::<f64>() * PI).collect()
        }
    }
}

/// Points on full diameters through DC at half-pixel radial steps, radius up
/// to 1/2, keeping those inside the unit square. Flattened, spoke by spoke.
pub fn radial_samples(dims: &GridDims, angles: &[f64]) -> Result<Vec<f64>> {
    if dims.rank() != 2 {
        return Err(VdsError::InvalidArgument("radial schemes are 2D".into()));
    }
    let c = dc_centre(dims);
    let step = 0.5 / dims.max_dim() as f64;
    let count = (1.0 / step).round() as usize;
    let mut out = Vec::new();
    for &theta in angles {
        let (s, co) = theta.sin_cos();
        for k in 0..=count {
            let rho = -0.5 + k as f64 * step;
            let (y, x) = (c[0] + rho * s, c[1] + rho * co);
            if (0.0..=1.0).contains(&y) && (0.0..=1.0).contains(&x) {
                out.push(y);
                out.push(x);
            }
        }
    }
    Ok(out)
}

pub fn radial_scheme(dims: &GridDims, spokes: usize, rule: &AngleRule) -> Result<SamplingScheme> {
    if spokes == 0 {
        return Err(VdsError::InvalidArgument("need at least one spoke".into()));
    }
    let (provenance, seed) = match rule {
        AngleRule::Uniform => (Provenance::Radial, 0),
        AngleRule::Random { seed } => (Provenance::RadialRandom, *seed),
    };
    let samples = radial_samples(dims, &spoke_angles(spokes, rule))?;
    regrid_nearest(&samples, dims, seed, provenance)
}

/// Draws `lines` positions iid from `p2d` on the plane of the first two axes
/// and acquires the full readout line along the last axis at each.
pub fn lines3d_scheme(
    dims: &GridDims,
    p2d: &DensityGrid,
    lines: usize,
    seed: u64,
) -> Result<SamplingScheme> {
    if dims.rank() != 3 {
        return Err(VdsError::InvalidArgument(format!(
            "readout-line schemes need a 3D grid, got rank {}",
            dims.rank()
        )));
    }
    let shape = dims.dims();
    if p2d.dims().dims() != &shape[..2] {
        return Err(VdsError::InvalidArgument(format!(
            "plane density on {:?} does not match {:?}",
            p2d.dims().dims(),
            &shape[..2]
        )));
    }
    if lines == 0 || lines > p2d.len() {
        return Err(VdsError::InvalidArgument(format!(
            "line count {lines} outside 1..={}",
            p2d.len()
        )));
    }
    let sampler = DiscreteSampler::new(p2d);
    let mut rng = rng_from_seed(seed);
    let readout = shape[2];
    let mut draws = Vec::with_capacity(lines * readout);
    for _ in 0..lines {
        let pos = sampler.sample(&mut rng);
        draws.extend((0..readout).map(|k| pos * readout + k));
    }
    SamplingScheme::from_draws(dims.clone(), vec![], draws, seed, Provenance::Lines3d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::polynomial_density;
    use crate::sampler_tsp::loglog_slope;

    fn dims(d: &[usize]) -> GridDims {
        GridDims::new(d.to_vec()).unwrap()
    }

    fn spec(turns: usize) -> SpiralSpec {
        SpiralSpec {
            r0: 1.0 / 128.0,
            r1: 0.5,
            turns,
            samples_per_turn: 256,
        }
    }

    #[test]
    fn spiral_endpoints_and_validation() {
        let s = spec(4);
        assert!((s.radius(0.0) - s.r0).abs() < 1e-15);
        assert!((s.radius(1.0) - s.r1).abs() < 1e-15);
        let traj = spiral_trajectory(&s, &[0.5, 0.5]).unwrap();
        assert_eq!(traj.vertex(0), &[0.5, 0.5]);
        let last = traj.vertex(traj.vertex_count() - 1);
        assert!(((last[0] - 0.5).hypot(last[1] - 0.5) - 0.5).abs() < 1e-12);
        let mut bad = s.clone();
        bad.r1 = bad.r0;
        assert!(spiral_trajectory(&bad, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn closed_form_bins_sum_to_one() {
        let s = spec(8);
        let edges: Vec<f64> = (0..=20).map(|i| i as f64 * 0.025).collect();
        let p = spiral_radial_density(&s, &edges);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spiral_radial_tv_decreases_with_turns() {
        let edges: Vec<f64> = (0..=32).map(|i| i as f64 / 64.0).collect();
        let tv: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&t| {
                let s = spec(t);
                let traj = spiral_trajectory(&s, &[0.5, 0.5]).unwrap();
                let occ = radial_occupation(&traj, &[0.5, 0.5], &edges, 1e-4).unwrap();
                let p = spiral_radial_density(&s, &edges);
                0.5 * occ.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum::<f64>()
            })
            .collect();
        assert!(tv[0] > tv[1] && tv[1] > tv[2], "{tv:?}");
    }

    #[test]
    fn spiral_scheme_contains_dc() {
        let d = dims(&[32, 32]);
        let s = spiral_scheme(&d, &spec(8)).unwrap();
        assert!(s.omega.contains(&d.dc_index()));
        assert!(s.trajectory.is_some());
    }

    #[test]
    fn single_horizontal_spoke() {
        let d = dims(&[8, 8]);
        let s = radial_scheme(&d, 1, &AngleRule::Uniform).unwrap();
        let mut omega = s.omega.clone();
        omega.sort();
        assert_eq!(omega, (32..40).collect::<Vec<_>>());
        assert!(s.omega.contains(&d.dc_index()));
    }

    #[test]
    fn radial_angles_reproducible() {
        let d = dims(&[16, 16]);
        assert_eq!(
            radial_scheme(&d, 5, &AngleRule::Uniform).unwrap(),
            radial_scheme(&d, 5, &AngleRule::Uniform).unwrap()
        );
        let a = radial_scheme(&d, 5, &AngleRule::Random { seed: 3 }).unwrap();
        assert_eq!(
            a,
            radial_scheme(&d, 5, &AngleRule::Random { seed: 3 }).unwrap()
        );
        assert_ne!(
            a.omega,
            radial_scheme(&d, 5, &AngleRule::Random { seed: 4 })
                .unwrap()
                .omega
        );
        assert_eq!(a.provenance, Provenance::RadialRandom);
    }

    #[test]
    fn radial_density_decays_like_inverse_radius() {
        let d = dims(&[64, 64]);
        let samples = radial_samples(&d, &spoke_angles(90, &AngleRule::Uniform)).unwrap();
        let c = dc_centre(&d);
        let edges: Vec<f64> = (0..=14).map(|i| 0.05 + i as f64 * 0.03).collect();
        let mut counts = vec![0.0; edges.len() - 1];
        for p in samples.chunks(2) {
            let rho = (p[0] - c[0]).hypot(p[1] - c[1]);
            let b = edges.partition_point(|&e| e <= rho);
            if b >= 1 && b < edges.len() {
                counts[b - 1] += 1.0;
            }
        }
        let mids: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let density: Vec<f64> = counts
            .iter()
            .zip(edges.windows(2))
            .map(|(c, w)| c / (PI * (w[1] * w[1] - w[0] * w[0])))
            .collect();
        let slope = loglog_slope(&mids, &density);
        assert!((slope + 1.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn readout_lines() {
        let d = dims(&[4, 4, 8]);
        let p2d = polynomial_density(&dims(&[4, 4]), 1.0).unwrap();
        let one = lines3d_scheme(&d, &p2d, 1, 2).unwrap();
        assert_eq!(one.m(), 8);
        let point = DensityGrid::point_mass(dims(&[4, 4]), 5).unwrap();
        let dup = lines3d_scheme(&d, &point, 3, 2).unwrap();
        assert_eq!(dup.m(), 8);
        assert_eq!(dup.raw_count(), 24);
        assert!(lines3d_scheme(&dims(&[4, 4]), &p2d, 1, 2).is_err());
    }

    #[test]
    fn plane_marginal_converges() {
        let d = dims(&[4, 4, 2]);
        let p2d = polynomial_density(&dims(&[4, 4]), 1.0).unwrap();
        let s = lines3d_scheme(&d, &p2d, 16, 7).unwrap();
        assert!(s.m() <= 32);
        let many: Vec<usize> = (0..2000)
            .flat_map(|seed| lines3d_scheme(&d, &p2d, 16, seed).unwrap().draw_log)
            .step_by(2)
            .map(|i| i / 2)
            .collect();
        let emp = crate::empirical::empirical_measure(&many, p2d.dims())
            .unwrap()
            .to_density();
        assert!(crate::empirical::tv_distance(&emp, &p2d).unwrap() < 0.02);
    }
}
