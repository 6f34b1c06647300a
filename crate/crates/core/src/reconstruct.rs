//! Noiseless ℓ1 reconstruction `min ‖z‖₁ s.t. A_Ω z = y` by Douglas-Rachford
//! splitting, and PSNR scoring.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdsError};
use crate::transforms::AcquisitionModel;

/// Relative RMSE below which two images count as identical.
pub const PSNR_ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructionConfig {
    /// Prox step of the ℓ1 term.
    pub gamma: f64,
    /// Relaxation in (0, 2).
    pub lambda: f64,
    /// Stop when `‖w_{k+1} - w_k‖ / max(1, ‖w_k‖)` falls below this.
    pub tol_fixed_point: f64,
    /// Required `‖A_Ω ẑ - y‖ / ‖y‖` at the output.
    pub tol_feasibility: f64,
    pub max_iter: usize,
    /// Measure the feasibility of every iterate (one extra transform each).
    pub track_feasibility: bool,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            lambda: 1.0,
            tol_fixed_point: 1e-9,
            tol_feasibility: 1e-8,
            max_iter: 20_000,
            track_feasibility: false,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(VdsError::InvalidArgument(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.lambda > 0.0 && self.lambda < 2.0) {
            return Err(VdsError::InvalidArgument(format!(
                "lambda must lie in (0, 2), got {}",
                self.lambda
            )));
        }
        if !(self.tol_fixed_point > 0.0 && self.tol_feasibility > 0.0) || self.max_iter == 0 {
            return Err(VdsError::InvalidArgument(
                "tolerances and max_iter must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub coefficients: Vec<Complex64>,
    /// `Ψ ẑ`.
    pub image: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    pub feasibility_residual: f64,
    pub fixed_point_residual: f64,
    pub l1_objective: f64,
    /// Largest iterate feasibility seen, when tracked.
    pub max_iterate_feasibility: Option<f64>,
}

impl ReconstructionResult {
    /// JSON metadata without the coefficient and image arrays.
    pub fn summary_json(&self) -> Result<String> {
        let v = serde_json::json!({
            "iterations": self.iterations,
            "converged": self.converged,
            "feasibility_residual": self.feasibility_residual,
            "fixed_point_residual": self.fixed_point_residual,
            "l1_objective": self.l1_objective,
        });
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

/// Prox of `γ|·|`: shrinks the modulus by `γ`, keeping the phase.
pub fn soft_threshold_scalar(z: Complex64, gamma: f64) -> Complex64 {
    let r = z.norm();
    if r <= gamma {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((r - gamma) / r)
    }
}

pub fn soft_threshold(z: &[Complex64], gamma: f64) -> Vec<Complex64> {
    z.iter().map(|&v| soft_threshold_scalar(v, gamma)).collect()
}

fn check_omega(model: &AcquisitionModel, omega: &[usize], y: &[Complex64]) -> Result<()> {
    if omega.is_empty() {
        return Err(VdsError::InvalidArgument("no acquired indices".into()));
    }
    if omega.len() != y.len() {
        return Err(VdsError::ShapeMismatch {
            expected: omega.len(),
            actual: y.len(),
        });
    }
    let mut seen = vec![false; model.n()];
    for &i in omega {
        model.dims.check_index(i)?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(VdsError::InvalidArgument(format!(
                "index {i} acquired twice"
            )));
        }
    }
    Ok(())
}

/// Zero-filled `A*_Ω y`.
fn adjoint_restricted(
    model: &AcquisitionModel,
    omega: &[usize],
    y: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mut full = vec![Complex64::default(); model.n()];
    for (&i, &v) in omega.iter().zip(y) {
        full[i] = v;
    }
    model.adjoint(&full)
}

fn project(
    model: &AcquisitionModel,
    omega: &[usize],
    y: &[Complex64],
    z: &[Complex64],
) -> Result<Vec<Complex64>> {
    if omega.len() == model.n() {
        let mut full = vec![Complex64::default(); model.n()];
        for (&i, &v) in omega.iter().zip(y) {
            full[i] = v;
        }
        return model.adjoint(&full);
    }
    let az = model.apply(z)?;
    let mut r = vec![Complex64::default(); model.n()];
    for (&i, &v) in omega.iter().zip(y) {
        r[i] = v - az[i];
    }
    let correction = model.adjoint(&r)?;
    Ok(z.iter().zip(&correction).map(|(a, b)| a + b).collect())
}

/// `z + A*_Ω(y - A_Ω z)`, the Euclidean projection onto `{A_Ω z = y}` (the
/// rows of `A` are orthonormal).
pub fn project_affine(
    model: &AcquisitionModel,
    z: &[Complex64],
    omega: &[usize],
    y: &[Complex64],
) -> Result<Vec<Complex64>> {
    model.dims.check_len(z.len())?;
    check_omega(model, omega, y)?;
    project(model, omega, y, z)
}

/// `‖A_Ω z - y‖₂ / ‖y‖₂` (absolute when `y = 0`).
pub fn feasibility_residual(
    model: &AcquisitionModel,
    z: &[Complex64],
    omega: &[usize],
    y: &[Complex64],
) -> Result<f64> {
    let az = model.apply(z)?;
    let num: f64 = omega
        .iter()
        .zip(y)
        .map(|(&i, v)| (az[i] - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den = norm(y);
    Ok(if den > 0.0 { num / den } else { num })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn douglas_rachford(
    model: &AcquisitionModel,
    omega: &[usize],
    y: &[Complex64],
    config: &ReconstructionConfig,
) -> Result<ReconstructionResult> {
    config.validate()?;
    check_omega(model, omega, y)?;

    let finish = |z: Vec<Complex64>,
                  iterations,
                  converged,
                  fixed,
                  tracked|
     -> Result<ReconstructionResult> {
        let feasibility = feasibility_residual(model, &z, omega, y)?;
        let image = model.synthesize(&z)?;
        Ok(ReconstructionResult {
            l1_objective: z.iter().map(|v| v.norm()).sum(),
            coefficients: z,
            image,
            iterations,
            converged: converged && feasibility <= config.tol_feasibility,
            feasibility_residual: feasibility,
            fixed_point_residual: fixed,
            max_iterate_feasibility: tracked,
        })
    };

    if omega.len() == model.n() {
        let z = adjoint_restricted(model, omega, y)?;
        return finish(z, 1, true, 0.0, None);
    }

    let mut w = adjoint_restricted(model, omega, y)?;
    let mut fixed = f64::INFINITY;
    let mut worst: Option<f64> = config.track_feasibility.then_some(0.0);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let pw = project(model, omega, y, &w)?;
        if let Some(worst) = worst.as_mut() {
            *worst = worst.max(feasibility_residual(model, &pw, omega, y)?);
        }
        let reflected: Vec<Complex64> = pw.iter().zip(&w).map(|(p, v)| 2.0 * p - v).collect();
        let prox = soft_threshold(&reflected, config.gamma);
        let mut step_sq = 0.0;
        let old_norm = norm(&w);
        for ((wi, pi), ri) in w.iter_mut().zip(&pw).zip(&prox) {
            let delta = config.lambda * (ri - pi);
            step_sq += delta.norm_sqr();
            *wi += delta;
        }
        fixed = step_sq.sqrt() / old_norm.max(1.0);
        if fixed < config.tol_fixed_point {
            converged = true;
            break;
        }
    }
    let z = project(model, omega, y, &w)?;
    finish(z, iterations, converged, fixed, worst)
}

/// `10 log10(peak² / MSE)` with `peak = max |reference|`. Images equal up to
/// round-off (RMSE at most `1e-12 · peak`) give `+∞`.
pub fn psnr(reference: &[f64], reconstructed: &[f64]) -> Result<f64> {
    if reference.len() != reconstructed.len() {
        return Err(VdsError::ShapeMismatch {
            expected: reference.len(),
            actual: reconstructed.len(),
        });
    }
    let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Err(VdsError::InvalidArgument("reference image is zero".into()));
    }
    let mse = reference
        .iter()
        .zip(reconstructed)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    Ok(if mse.sqrt() <= PSNR_ROUNDOFF * peak {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::optimal_density;
    use crate::grid::GridDims;
    use crate::rng::rng_from_seed;
    use crate::sampler_iid::draw_iid;
    use crate::scheme::Stop;
    use crate::transforms::WaveletSpec;
    use rand::Rng;

    fn model(side: usize, levels: usize) -> AcquisitionModel {
        AcquisitionModel::new(
            GridDims::new(vec![side, side]).unwrap(),
            WaveletSpec::haar(levels),
        )
        .unwrap()
    }

    fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = rng_from_seed(seed);
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn measure(model: &AcquisitionModel, z: &[Complex64], omega: &[usize]) -> Vec<Complex64> {
        let full = model.apply(z).unwrap();
        omega.iter().map(|&i| full[i]).collect()
    }

    #[test]
    fn soft_threshold_examples() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(soft_threshold_scalar(c(3.0, 0.0), 1.0), c(2.0, 0.0));
        assert_eq!(soft_threshold_scalar(c(-0.5, 0.0), 1.0), c(0.0, 0.0));
        assert_eq!(soft_threshold_scalar(c(3.0, 4.0), 5.0), c(0.0, 0.0));
        let h = soft_threshold_scalar(c(3.0, 4.0), 2.5);
        assert!((h - c(1.5, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_properties() {
        let m = model(8, 2);
        let omega: Vec<usize> = (0..64).step_by(3).collect();
        let y = random_vec(omega.len(), 1);
        let z = random_vec(64, 2);
        let p = project_affine(&m, &z, &omega, &y).unwrap();
        assert!(feasibility_residual(&m, &p, &omega, &y).unwrap() < 1e-12);
        let pp = project_affine(&m, &p, &omega, &y).unwrap();
        assert!(p.iter().zip(&pp).all(|(a, b)| (a - b).norm() < 1e-12));

        let all: Vec<usize> = (0..64).collect();
        let y_all = random_vec(64, 3);
        let direct = adjoint_restricted(&m, &all, &y_all).unwrap();
        assert_eq!(project_affine(&m, &z, &all, &y_all).unwrap(), direct);

        assert!(project_affine(&m, &z, &[1, 1], &y[..2]).is_err());
        assert!(project_affine(&m, &z, &[1, 2], &y[..3]).is_err());
    }

    #[test]
    fn full_sampling_is_immediate() {
        let m = model(8, 2);
        let z0 = random_vec(64, 4);
        let all: Vec<usize> = (0..64).collect();
        let y = measure(&m, &z0, &all);
        let r = douglas_rachford(&m, &all, &y, &ReconstructionConfig::default()).unwrap();
        assert!(r.iterations <= 2 && r.converged);
        assert!(r
            .coefficients
            .iter()
            .zip(&z0)
            .all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn one_sparse_recovery() {
        let m = model(16, 3);
        let pi = optimal_density(&m);
        let config = ReconstructionConfig {
            track_feasibility: true,
            ..Default::default()
        };
        for seed in 0..5u64 {
            let mut rng = rng_from_seed(100 + seed);
            let mut z0 = vec![Complex64::default(); 256];
            z0[rng.gen_range(0..256)] = Complex64::new(if rng.gen() { 1.0 } else { -1.0 }, 0.0);
            let scheme = draw_iid(&pi, Stop::distinct(128, 256), seed).unwrap();
            let y = measure(&m, &z0, &scheme.omega);
            let r = douglas_rachford(&m, &scheme.omega, &y, &config).unwrap();
            let err = norm(
                &r.coefficients
                    .iter()
                    .zip(&z0)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
            ) / norm(&z0);
            assert!(err < 1e-6, "seed {seed}: {err}");
            assert!(r.converged);
            assert!(r.max_iterate_feasibility.unwrap() < 1e-10);
        }
    }

    #[test]
    fn config_validation() {
        let m = model(4, 1);
        let bad = ReconstructionConfig {
            lambda: 2.0,
            ..Default::default()
        };
        assert!(douglas_rachford(&m, &[0], &[Complex64::default()], &bad).is_err());
        assert!(douglas_rachford(&m, &[], &[], &ReconstructionConfig::default()).is_err());
    }

    #[test]
    fn psnr_examples() {
        assert_eq!(psnr(&[1.0, 0.5], &[1.0, 0.5]).unwrap(), f64::INFINITY);
        assert!(psnr(&[1.0, -1.0], &[0.0, 0.0]).unwrap().abs() < 1e-12);
        let reference = vec![1.0, 0.0, 0.0, 0.0];
        let recon = vec![1.02, 0.0, 0.0, 0.0];
        assert!((psnr(&reference, &recon).unwrap() - 40.0).abs() < 1e-9);
        assert!(psnr(&[0.0; 3], &[0.0; 3]).is_err());
    }
}
