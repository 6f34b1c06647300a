use crate::density::{deterministic_set, restrict_and_renormalize, DensityGrid};
use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::sampler_iid::{draw_iid, draw_mixed};
use crate::sampler_markov::{
    metropolis_kernel, mix_with_jumps, run_chain, Neighborhood, TransitionKernel,
};
use crate::sampler_parametric::{
    lines3d_scheme, radial_scheme, spiral_scheme, AngleRule, SpiralSpec,
};
use crate::sampler_tsp::{
    draw_points, regrid_trajectory, solve_tsp, target_to_initial_density, Effort,
};
use crate::scheme::{Provenance, SamplingScheme, Stop};
use crate::transforms::AcquisitionModel;

use super::config::{ExperimentConfig, SchemeKind, SchemeSpec};

/// A scheme spec with its density (and kernel) prepared once, ready to draw
/// many calibrated realizations.
pub struct PreparedScheme {
    pub name: String,
    dims: GridDims,
    target: usize,
    /// Deterministic low-frequency set shared by mixed, Markov and TSP
    /// schemes.
    omega1: Vec<usize>,
    plan: Plan,
}

enum Plan {
    Full,
    Iid(DensityGrid),
    Mixed(DensityGrid, Box<AcquisitionModel>),
    Markov(TransitionKernel),
    Tsp { cities: DensityGrid, effort: Effort },
    Spiral { samples_per_turn: usize },
    Radial { random: bool },
    Lines3d(DensityGrid),
}

impl PreparedScheme {
    pub fn new(
        spec: &SchemeSpec,
        cfg: &ExperimentConfig,
        model: &AcquisitionModel,
    ) -> Result<Self> {
        let dims = cfg.dims.clone();
        let target = cfg.target_m();
        let m1 = ((cfg.m1_fraction * target as f64).round() as usize).min(target);
        let omega1 = deterministic_set(model, m1)?;
        let plan = match &spec.kind {
            SchemeKind::Full => Plan::Full,
            SchemeKind::Iid { density } => Plan::Iid(density.build(&dims, Some(model))?),
            SchemeKind::Mixed { density } => {
                Plan::Mixed(density.build(&dims, Some(model))?, Box::new(model.clone()))
            }
            SchemeKind::Markov {
                density,
                alpha,
                periodic,
            } => {
                let p = density.build(&dims, Some(model))?;
                let local = metropolis_kernel(
                    &p,
                    Neighborhood::VonNeumann {
                        periodic: *periodic,
                    },
                )?;
                Plan::Markov(mix_with_jumps(&local, *alpha)?)
            }
            SchemeKind::Tsp { density, effort } => {
                let p = restrict_and_renormalize(&density.build(&dims, Some(model))?, &omega1)?;
                Plan::Tsp {
                    cities: target_to_initial_density(&p, dims.rank())?,
                    effort: *effort,
                }
            }
            SchemeKind::Spiral { samples_per_turn } => Plan::Spiral {
                samples_per_turn: *samples_per_turn,
            },
            SchemeKind::Radial => Plan::Radial { random: false },
            SchemeKind::RadialRandom => Plan::Radial { random: true },
            SchemeKind::Lines3d { density } => {
                if dims.rank() != 3 {
                    return Err(VdsError::Config(format!(
                        "scheme {:?} needs a 3D grid",
                        spec.name
                    )));
                }
                let plane = GridDims::new(dims.dims()[..2].to_vec())?;
                Plan::Lines3d(density.build(&plane, None)?)
            }
        };
        Ok(Self {
            name: spec.name.clone(),
            dims,
            target,
            omega1,
            plan,
        })
    }

    /// Distinct samples every realization aims for.
    pub fn target(&self) -> usize {
        self.target
    }

    /// One realization with exactly `target` distinct indices (every index
    /// for `Full`).
    pub fn draw(&self, seed: u64) -> Result<SamplingScheme> {
        let n = self.dims.len();
        let m = self.target;
        let dims = &self.dims;
        match &self.plan {
            Plan::Full => Ok(SamplingScheme::full(dims.clone())),
            Plan::Iid(p) => draw_iid(p, Stop::distinct(m, n), seed),
            Plan::Mixed(p, model) => {
                draw_mixed(model, p, self.omega1.len(), Stop::distinct(m, n), seed)
            }
            Plan::Markov(k) => {
                let chain = run_chain(k, Stop::distinct(m, n), seed)?;
                self.with_centre(chain, m)
            }
            Plan::Tsp { cities, effort } => calibrate(m, 64 * n, |count| {
                let cloud = draw_points(cities, count.max(2), seed)?;
                let curve =
                    regrid_trajectory(&solve_tsp(&cloud, *effort)?, dims, seed, Provenance::Tsp)?;
                self.with_centre(curve, m)
            }),
            Plan::Spiral { samples_per_turn } => calibrate(m, 4 * dims.max_dim(), |turns| {
                let spec = SpiralSpec {
                    r0: 0.5 / dims.max_dim() as f64,
                    r1: 0.5,
                    turns,
                    samples_per_turn: *samples_per_turn,
                };
                spiral_scheme(dims, &spec)
            }),
            Plan::Radial { random } => {
                let rule = if *random {
                    AngleRule::Random { seed }
                } else {
                    AngleRule::Uniform
                };
                calibrate(m, 8 * dims.max_dim(), |spokes| {
                    radial_scheme(dims, spokes, &rule)
                })
            }
            Plan::Lines3d(p2d) => {
                calibrate(m, p2d.len(), |lines| lines3d_scheme(dims, p2d, lines, seed))
            }
        }
    }
}

impl PreparedScheme {
    /// Puts the deterministic set in front of the draws of `scheme`, cut at
    /// `m` distinct indices.
    fn with_centre(&self, scheme: SamplingScheme, m: usize) -> Result<SamplingScheme> {
        if self.omega1.is_empty() {
            let mut scheme = scheme;
            scheme.truncate_to_distinct(m);
            return Ok(scheme);
        }
        let trajectory = scheme.trajectory.clone();
        let mut merged = SamplingScheme::from_draws(
            scheme.dims,
            self.omega1.clone(),
            scheme.draw_log,
            scheme.seed,
            scheme.provenance,
        )?;
        merged.trajectory = trajectory;
        merged.truncate_to_distinct(m);
        Ok(merged)
    }
}

/// Smallest `k` in `1..=cap` whose scheme reaches `m` distinct indices (by
/// doubling then bisection), truncated to exactly `m`.
pub fn calibrate<F>(m: usize, cap: usize, build: F) -> Result<SamplingScheme>
where
    F: Fn(usize) -> Result<SamplingScheme>,
{
    let mut hi = 1usize;
    let mut best = build(hi)?;
    while best.m() < m {
        if hi >= cap {
            return Err(VdsError::InvalidArgument(format!(
                "cannot reach {m} distinct samples (got {} at parameter {hi})",
                best.m()
            )));
        }
        hi = (hi * 2).min(cap);
        best = build(hi)?;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let s = build(mid)?;
        if s.m() >= m {
            hi = mid;
            best = s;
        } else {
            lo = mid;
        }
    }
    best.truncate_to_distinct(m);
    Ok(best)
}
