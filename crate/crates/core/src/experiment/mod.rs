//! Config-driven experiments: scheme generation, reconstruction benchmarks
//! and verification suites, as run by the command-line tool.
//!
//! A config is a TOML file:
//!
//! ```toml
//! dims = [64, 64]
//! sampling_ratio = 5.0       # R = n / m
//! trials = 20
//! seed = 7
//! output_dir = "out"         # relative to the config file
//! m1_fraction = 0.0          # deterministic share of mixed schemes
//!
//! [wavelet]
//! levels = 4
//! family = { kind = "symmlet10" }
//!
//! [phantom]
//! kind = "builtin"           # or kind = "file", path = "image.vdsg"
//!
//! [density]                  # used by the `density` command
//! kind = "optimal"           # uniform | polynomial (exponent) | file (path)
//!
//! [reconstruction]
//! max_iter = 500
//!
//! [[schemes]]
//! name = "tsp"
//! kind = "tsp"
//! density = { kind = "polynomial", exponent = 2.0 }
//!
//! [[schemes]]
//! name = "markov"
//! kind = "markov"
//! alpha = 0.1
//! density = { kind = "polynomial", exponent = 2.0 }
//! ```
//!
//! Scheme kinds: `full`, `iid`, `mixed`, `markov` (`alpha`, `periodic`),
//! `tsp` (`effort`), `spiral` (`samples_per_turn`), `radial`,
//! `radial_random`, `lines3d`. Every realization is calibrated to exactly
//! `round(n / R)` distinct samples. Trial `t` of the `k`-th scheme uses seed
//! `derive_seed(derive_seed(seed, k), t)`.

mod benchmark;
mod commands;
mod config;
mod phantom;
mod schemes;
mod verify;

pub use benchmark::{
    measure, reconstruct_and_score, run_benchmark, trial_seed, BenchmarkRow, BenchmarkTable,
};
pub use commands::{
    cmd_benchmark, cmd_density, cmd_reconstruct, cmd_scheme, cmd_verify, Overrides,
};
pub use config::{
    BoundSettings, DensitySpec, ExperimentConfig, PhantomSource, SchemeKind, SchemeSpec,
};
pub use phantom::{load_phantom, shepp_logan};
pub use schemes::{calibrate, PreparedScheme};
pub use verify::{run_verification, Check, VerificationReport};
