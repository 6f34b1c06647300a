use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::density::{optimal_density, polynomial_density, DensityGrid};
use crate::error::{Result, VdsError};
use crate::grid::{GridDims, RealGrid};
use crate::reconstruct::ReconstructionConfig;
use crate::sampler_tsp::Effort;
use crate::transforms::{AcquisitionModel, WaveletSpec};

/// Where the reference image comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhantomSource {
    /// Analytic Shepp-Logan-like ellipses.
    Builtin,
    /// A real VDSG grid.
    File { path: PathBuf },
}

/// A target sampling density on the experiment grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DensitySpec {
    /// `π ∝ ‖a_i‖∞²` for the configured wavelet.
    Optimal,
    Uniform,
    /// `∝ |k|^{-exponent}`.
    Polynomial {
        exponent: f64,
    },
    /// A real VDSG grid, renormalized.
    File {
        path: PathBuf,
    },
}

impl DensitySpec {
    pub fn build(&self, dims: &GridDims, model: Option<&AcquisitionModel>) -> Result<DensityGrid> {
        let p = match self {
            DensitySpec::Optimal => {
                let model = model.ok_or_else(|| {
                    VdsError::Config("optimal density needs a wavelet model".into())
                })?;
                optimal_density(model)
            }
            DensitySpec::Uniform => DensityGrid::uniform(dims.clone()),
            DensitySpec::Polynomial { exponent } => polynomial_density(dims, *exponent)?,
            DensitySpec::File { path } => DensityGrid::from_grid(&RealGrid::load(path)?)?,
        };
        if p.dims() != dims {
            return Err(VdsError::Config(format!(
                "density grid {:?} does not match {:?}",
                p.dims().dims(),
                dims.dims()
            )));
        }
        Ok(p)
    }
}

/// One sampling scheme of an experiment. `name` labels output files and rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: SchemeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SchemeKind {
    /// Every index (ignores the sampling ratio).
    Full,
    Iid {
        density: DensitySpec,
    },
    /// The `m1_fraction · m` most coherent rows, then iid draws.
    Mixed {
        density: DensitySpec,
    },
    Markov {
        density: DensitySpec,
        alpha: f64,
        #[serde(default)]
        periodic: bool,
    },
    /// TSP curve whose occupation targets `density`.
    Tsp {
        density: DensitySpec,
        #[serde(default)]
        effort: Effort,
    },
    Spiral {
        #[serde(default = "default_samples_per_turn")]
        samples_per_turn: usize,
    },
    Radial,
    RadialRandom,
    /// Readout lines along the last axis at positions drawn from a density on
    /// the first two axes.
    Lines3d {
        density: DensitySpec,
    },
}

fn default_samples_per_turn() -> usize {
    256
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSettings {
    pub sparsity: usize,
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dims: GridDims,
    pub wavelet: WaveletSpec,
    #[serde(default = "default_phantom")]
    pub phantom: PhantomSource,
    /// Density written by the `density` command.
    #[serde(default = "default_density")]
    pub density: DensitySpec,
    #[serde(default)]
    pub schemes: Vec<SchemeSpec>,
    /// `R = n / m`.
    pub sampling_ratio: f64,
    #[serde(default)]
    pub m1_fraction: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub reconstruction: ReconstructionConfig,
    #[serde(default)]
    pub bounds: Option<BoundSettings>,
}

fn default_phantom() -> PhantomSource {
    PhantomSource::Builtin
}

fn default_density() -> DensitySpec {
    DensitySpec::Optimal
}

fn default_trials() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Parses TOML. Relative paths are resolved against `base`.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| VdsError::Config(e.to_string()))?;
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| VdsError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| VdsError::Config(e.to_string()))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let PhantomSource::File { path } = &mut self.phantom {
            fix(path);
        }
        let mut densities: Vec<&mut DensitySpec> = vec![&mut self.density];
        for s in &mut self.schemes {
            match &mut s.kind {
                SchemeKind::Iid { density }
                | SchemeKind::Mixed { density }
                | SchemeKind::Markov { density, .. }
                | SchemeKind::Tsp { density, .. }
                | SchemeKind::Lines3d { density } => densities.push(density),
                _ => {}
            }
        }
        for d in densities {
            if let DensitySpec::File { path } = d {
                fix(path);
            }
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(VdsError::Config(msg));
        if !(self.sampling_ratio > 1.0) {
            return bad(format!(
                "sampling_ratio must be > 1, got {}",
                self.sampling_ratio
            ));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.m1_fraction) {
            return bad(format!(
                "m1_fraction must lie in [0, 1), got {}",
                self.m1_fraction
            ));
        }
        self.reconstruction
            .validate()
            .map_err(|e| VdsError::Config(e.to_string()))?;
        if let PhantomSource::File { path } = &self.phantom {
            if !path.exists() {
                return bad(format!("phantom file {} not found", path.display()));
            }
        }
        let mut names = std::collections::HashSet::new();
        for s in &self.schemes {
            if !names.insert(&s.name) {
                return bad(format!("duplicate scheme name {:?}", s.name));
            }
            if s.name.is_empty() || s.name.contains(['/', '\\']) {
                return bad(format!("scheme name {:?} is not a plain file stem", s.name));
            }
            if let SchemeKind::Markov { alpha, .. } = s.kind {
                if !(0.0..=1.0).contains(&alpha) {
                    return bad(format!("scheme {:?}: alpha {alpha} outside [0, 1]", s.name));
                }
            }
        }
        Ok(())
    }

    /// Target number of distinct samples, `round(n / R)`.
    pub fn target_m(&self) -> usize {
        ((self.dims.len() as f64 / self.sampling_ratio).round() as usize).clamp(1, self.dims.len())
    }

    pub fn model(&self) -> Result<AcquisitionModel> {
        AcquisitionModel::new(self.dims.clone(), self.wavelet.clone())
            .map_err(|e| VdsError::Config(e.to_string()))
    }
}
