//! Variable-density sampling for compressed-sensing MRI: target densities,
//! iid / Markov / TSP / parametric samplers, convergence diagnostics and ℓ1
//! reconstruction.

pub mod density;
pub mod empirical;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod reconstruct;
pub mod rng;
pub mod sampler_iid;
pub mod sampler_markov;
pub mod sampler_parametric;
pub mod sampler_tsp;
pub mod scheme;
pub mod transforms;

pub use error::{Result, VdsError};
