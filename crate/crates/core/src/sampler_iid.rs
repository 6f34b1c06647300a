//! Independent drawing from a density and the mixed deterministic + iid scheme.

use std::collections::HashSet;

use rand::Rng;

use crate::density::{deterministic_set, restrict_and_renormalize, DensityGrid};
use crate::error::{Result, VdsError};
use crate::rng::rng_from_seed;
use crate::scheme::{Provenance, SamplingScheme, Stop};
use crate::transforms::AcquisitionModel;

/// Inverse-CDF sampler over a flattened density.
#[derive(Clone, Debug)]
pub struct DiscreteSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl DiscreteSampler {
    pub fn new(p: &DensityGrid) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = p
            .mass()
            .iter()
            .map(|&v| {
                acc += v;
                acc
            })
            .collect();
        let last_positive = p.mass().iter().rposition(|&v| v > 0.0).unwrap_or(0);
        Self {
            cumulative,
            last_positive,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.last_positive)
    }
}

/// Draws indices iid from `p` until `stop` is met.
pub fn draw_iid(p: &DensityGrid, stop: Stop, seed: u64) -> Result<SamplingScheme> {
    finish(
        p,
        vec![],
        iid_draws(p, stop, seed, &HashSet::new()),
        seed,
        Provenance::Iid,
    )
}

enum DrawFailure {
    Invalid(VdsError),
    Exhausted {
        draws: Vec<usize>,
        budget: usize,
        reached: usize,
        target: usize,
    },
}

fn finish(
    p: &DensityGrid,
    omega1: Vec<usize>,
    outcome: std::result::Result<Vec<usize>, DrawFailure>,
    seed: u64,
    provenance: Provenance,
) -> Result<SamplingScheme> {
    match outcome {
        Ok(draws) => SamplingScheme::from_draws(p.dims().clone(), omega1, draws, seed, provenance),
        Err(DrawFailure::Invalid(e)) => Err(e),
        Err(DrawFailure::Exhausted {
            draws,
            budget,
            reached,
            target,
        }) => {
            let partial =
                SamplingScheme::from_draws(p.dims().clone(), omega1, draws, seed, provenance)?;
            Err(VdsError::BudgetExhausted {
                budget,
                reached,
                target,
                partial: Box::new(partial),
            })
        }
    }
}

/// Raw iid draws; `already` counts towards the distinct target.
fn iid_draws(
    p: &DensityGrid,
    stop: Stop,
    seed: u64,
    already: &HashSet<usize>,
) -> std::result::Result<Vec<usize>, DrawFailure> {
    let sampler = DiscreteSampler::new(p);
    let mut rng = rng_from_seed(seed);
    match stop {
        Stop::Draws(m) => Ok((0..m).map(|_| sampler.sample(&mut rng)).collect()),
        Stop::Distinct { target, max_draws } => {
            let support = p.mass().iter().filter(|&&v| v > 0.0).count() + already.len();
            if target > support {
                return Err(DrawFailure::Invalid(VdsError::InvalidArgument(format!(
                    "{target} distinct samples requested but only {support} cells are reachable"
                ))));
            }
            let mut seen = already.clone();
            let mut draws = Vec::new();
            while seen.len() < target {
                if draws.len() == max_draws {
                    return Err(DrawFailure::Exhausted {
                        draws,
                        budget: max_draws,
                        reached: seen.len(),
                        target,
                    });
                }
                let i = sampler.sample(&mut rng);
                seen.insert(i);
                draws.push(i);
            }
            Ok(draws)
        }
    }
}

/// `Ω = Ω₁ ∪ Ω₂`: the `m1` most coherent rows, then iid draws from `p`
/// restricted to the complement of `Ω₁`. With `Stop::Distinct`, the target
/// counts the whole of `Ω`.
pub fn draw_mixed(
    model: &AcquisitionModel,
    p: &DensityGrid,
    m1: usize,
    stop: Stop,
    seed: u64,
) -> Result<SamplingScheme> {
    model.dims.check_len(p.len())?;
    let omega1 = deterministic_set(model, m1)?;
    let needs_draws = match stop {
        Stop::Draws(m2) => m2 > 0,
        Stop::Distinct { target, .. } => target > m1,
    };
    if !needs_draws {
        return SamplingScheme::from_draws(
            p.dims().clone(),
            omega1,
            vec![],
            seed,
            Provenance::Mixed,
        );
    }
    let restricted = restrict_and_renormalize(p, &omega1)?;
    let already: HashSet<usize> = omega1.iter().copied().collect();
    let outcome = iid_draws(&restricted, stop, seed, &already);
    finish(p, omega1, outcome, seed, Provenance::Mixed)
}
