//! Metropolis random walks on the grid, jump-mixed kernels, spectral gaps and
//! the `W_m` recovery certificate.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityGrid;
use crate::error::{Result, VdsError};
use crate::grid::GridDims;
use crate::rng::rng_from_seed;
use crate::sampler_iid::DiscreteSampler;
use crate::scheme::{Provenance, SamplingScheme, Stop};
use crate::transforms::AcquisitionModel;

/// Row-sum, detailed-balance and stationarity tolerance.
pub const KERNEL_TOLERANCE: f64 = 1e-12;
/// Largest state space handled by the dense eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 4096;
/// Largest state space for the dense certificate accumulation.
pub const CERTIFICATE_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Neighborhood {
    /// 2 neighbours per axis (4 in 2D, 6 in 3D).
    VonNeumann { periodic: bool },
    /// Every other state.
    Complete,
}

impl Neighborhood {
    fn of(&self, dims: &GridDims, i: usize) -> Vec<usize> {
        match *self {
            Neighborhood::Complete => (0..dims.len()).filter(|&j| j != i).collect(),
            Neighborhood::VonNeumann { periodic } => {
                let coords = dims.unravel(i);
                let mut out = Vec::with_capacity(2 * dims.rank());
                for (a, &d) in dims.dims().iter().enumerate() {
                    for step in [-1i64, 1] {
                        let c = coords[a] as i64 + step;
                        let c = if periodic {
                            c.rem_euclid(d as i64)
                        } else if c < 0 || c >= d as i64 {
                            continue;
                        } else {
                            c
                        };
                        let mut nc = coords.clone();
                        nc[a] = c as usize;
                        let j = dims.ravel(&nc);
                        if j != i && !out.contains(&j) {
                            out.push(j);
                        }
                    }
                }
                out
            }
        }
    }
}

/// `P = (1 - α) L + α 1 pᵀ` with a sparse local part `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionKernel {
    dims: GridDims,
    local: Vec<Vec<(usize, f64)>>,
    jump: f64,
    stationary: DensityGrid,
    neighborhood: Option<Neighborhood>,
}

impl TransitionKernel {
    /// A kernel from explicit sparse rows, checked for row-stochasticity and
    /// stationarity of `stationary`.
    pub fn from_rows(
        dims: GridDims,
        rows: Vec<Vec<(usize, f64)>>,
        stationary: DensityGrid,
    ) -> Result<Self> {
        dims.check_len(rows.len())?;
        dims.check_len(stationary.len())?;
        for row in &rows {
            for &(j, v) in row {
                dims.check_index(j)?;
                if !(v >= 0.0) {
                    return Err(VdsError::InvalidArgument(format!(
                        "negative transition {v}"
                    )));
                }
            }
        }
        let kernel = Self {
            dims,
            local: rows,
            jump: 0.0,
            stationary,
            neighborhood: None,
        };
        let rs = kernel.row_sum_residual();
        if rs > KERNEL_TOLERANCE {
            return Err(VdsError::InvalidArgument(format!(
                "rows do not sum to 1 (residual {rs:.3e})"
            )));
        }
        let st = kernel.stationarity_residual();
        if st > KERNEL_TOLERANCE {
            return Err(VdsError::InvalidArgument(format!(
                "density is not stationary (residual {st:.3e})"
            )));
        }
        Ok(kernel)
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &GridDims {
        &self.dims
    }

    pub fn stationary(&self) -> &DensityGrid {
        &self.stationary
    }

    pub fn neighborhood(&self) -> Option<Neighborhood> {
        self.neighborhood
    }

    /// Jump probability `α`.
    pub fn alpha(&self) -> f64 {
        self.jump
    }

    /// `P_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let local: f64 = self.local[i].iter().filter(|e| e.0 == j).map(|e| e.1).sum();
        (1.0 - self.jump) * local + self.jump * self.stationary.mass()[j]
    }

    pub fn row_sum_residual(&self) -> f64 {
        self.local
            .iter()
            .map(|row| {
                let s: f64 = row.iter().map(|e| e.1).sum();
                ((1.0 - self.jump) * s + self.jump - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max |p_i P_ij - p_j P_ji|`. The jump part is symmetric in this sense.
    pub fn detailed_balance_residual(&self) -> f64 {
        let p = self.stationary.mass();
        let mut worst = 0.0f64;
        for (i, row) in self.local.iter().enumerate() {
            for &(j, v) in row {
                let back: f64 = self.local[j].iter().filter(|e| e.0 == i).map(|e| e.1).sum();
                worst = worst.max(((1.0 - self.jump) * (p[i] * v - p[j] * back)).abs());
            }
        }
        worst
    }

    /// `‖pP - p‖∞`.
    pub fn stationarity_residual(&self) -> f64 {
        let p = self.stationary.mass();
        let mut out = vec![0.0; self.n()];
        for (i, row) in self.local.iter().enumerate() {
            for &(j, v) in row {
                out[j] += p[i] * v;
            }
        }
        out.iter()
            .zip(p)
            .map(|(&lp, &pj)| ((1.0 - self.jump) * lp + self.jump * pj - pj).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_reversible(&self) -> bool {
        self.detailed_balance_residual() <= KERNEL_TOLERANCE
    }

    /// Dense `P`.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        if n > DENSE_EIGEN_LIMIT {
            return Err(VdsError::TooLarge {
                n,
                limit: DENSE_EIGEN_LIMIT,
            });
        }
        let p = self.stationary.mass();
        let mut m = DMatrix::from_fn(n, n, |_, j| self.jump * p[j]);
        for (i, row) in self.local.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += (1.0 - self.jump) * v;
            }
        }
        Ok(m)
    }

    /// `y = D^{1/2} P D^{-1/2} x`, the symmetrized kernel applied to `x`.
    fn symmetrized_apply(&self, sqrt_p: &[f64], x: &[f64], y: &mut [f64]) {
        let proj: f64 = sqrt_p.iter().zip(x).map(|(a, b)| a * b).sum();
        for (i, row) in self.local.iter().enumerate() {
            let acc: f64 = row.iter().map(|&(j, v)| v * x[j] / sqrt_p[j]).sum();
            y[i] = (1.0 - self.jump) * sqrt_p[i] * acc + self.jump * sqrt_p[i] * proj;
        }
    }

    /// Coordinate-list export: a comment header, then `i j P_ij` per nonzero.
    pub fn to_coo_text(&self) -> String {
        let mut out = format!("# n={} alpha={}\n", self.n(), self.jump);
        for i in 0..self.n() {
            if self.jump > 0.0 {
                for j in 0..self.n() {
                    let v = self.entry(i, j);
                    if v != 0.0 {
                        writeln!(out, "{i} {j} {v:e}").unwrap();
                    }
                }
            } else {
                let mut row = self.local[i].clone();
                row.sort_by_key(|e| e.0);
                for (j, v) in row {
                    if v != 0.0 {
                        writeln!(out, "{i} {j} {v:e}").unwrap();
                    }
                }
            }
        }
        out
    }
}

/// Metropolis kernel for `p` with the uniform proposal on `neighborhood`:
/// `P_ij = min(1, p_j |N(i)| / (p_i |N(j)|)) / |N(i)|` for `j ∈ N(i)`, and the
/// diagonal takes the remaining mass.
pub fn metropolis_kernel(p: &DensityGrid, neighborhood: Neighborhood) -> Result<TransitionKernel> {
    if let Some(i) = p.mass().iter().position(|&v| v <= 0.0) {
        return Err(VdsError::InvalidDensity(format!(
            "Metropolis target must be strictly positive, cell {i} has no mass"
        )));
    }
    let dims = p.dims().clone();
    let mass = p.mass();
    let neighbours: Vec<Vec<usize>> = (0..dims.len()).map(|i| neighborhood.of(&dims, i)).collect();
    let local = neighbours
        .iter()
        .enumerate()
        .map(|(i, nb)| {
            let ni = nb.len() as f64;
            let mut row: Vec<(usize, f64)> = nb
                .iter()
                .map(|&j| {
                    let nj = neighbours[j].len() as f64;
                    let accept = (mass[j] * ni / (mass[i] * nj)).min(1.0);
                    (j, accept / ni)
                })
                .collect();
            let off: f64 = row.iter().map(|e| e.1).sum();
            let stay = 1.0 - off;
            if stay > 0.0 {
                row.push((i, stay));
            }
            row
        })
        .collect();
    Ok(TransitionKernel {
        dims,
        local,
        jump: 0.0,
        stationary: p.clone(),
        neighborhood: Some(neighborhood),
    })
}

/// `P^(α) = (1 - α) P + α P̃` with `P̃_ij = p_j`.
pub fn mix_with_jumps(kernel: &TransitionKernel, alpha: f64) -> Result<TransitionKernel> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(VdsError::InvalidArgument(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let mut out = kernel.clone();
    out.jump = alpha + kernel.jump - alpha * kernel.jump;
    Ok(out)
}

/// Runs the chain from `X₁ ~ p`. The visit sequence is the draw log.
pub fn run_chain(kernel: &TransitionKernel, stop: Stop, seed: u64) -> Result<SamplingScheme> {
    let mut rng = rng_from_seed(seed);
    let start = DiscreteSampler::new(&kernel.stationary);
    let provenance = Provenance::Markov { alpha: kernel.jump };
    let n = kernel.n();

    let (steps, target) = match stop {
        Stop::Draws(k) => (k, None),
        Stop::Distinct { target, max_draws } => {
            if target > n {
                return Err(VdsError::InvalidArgument(format!(
                    "target {target} exceeds n = {n}"
                )));
            }
            (max_draws, Some(target))
        }
    };

    let mut visits = Vec::new();
    let mut seen = vec![false; n];
    let mut distinct = 0;
    let mut state = start.sample(&mut rng);
    while visits.len() < steps {
        if target == Some(distinct) {
            break;
        }
        visits.push(state);
        if !seen[state] {
            seen[state] = true;
            distinct += 1;
        }
        if target == Some(distinct) {
            break;
        }
        state = step(kernel, &start, state, &mut rng);
    }
    let scheme = SamplingScheme::from_draws(kernel.dims.clone(), vec![], visits, seed, provenance)?;
    match target {
        Some(t) if distinct < t => Err(VdsError::BudgetExhausted {
            budget: steps,
            reached: distinct,
            target: t,
            partial: Box::new(scheme),
        }),
        _ => Ok(scheme),
    }
}

fn step<R: Rng>(
    kernel: &TransitionKernel,
    jump: &DiscreteSampler,
    state: usize,
    rng: &mut R,
) -> usize {
    if kernel.jump > 0.0 && rng.gen::<f64>() < kernel.jump {
        return jump.sample(rng);
    }
    let row = &kernel.local[state];
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(j, v) in row {
        acc += v;
        if u < acc {
            return j;
        }
    }
    // Rounding left a sliver at the end of the row.
    row.iter()
        .rev()
        .find(|e| e.1 > 0.0)
        .map(|e| e.0)
        .unwrap_or(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    DenseSymmetricEig,
    Lanczos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda2: f64,
    pub gap: f64,
    pub method: EigenMethod,
}

/// `1 - λ₂` of a reversible kernel, dense up to [`DENSE_EIGEN_LIMIT`] states.
pub fn spectral_gap(kernel: &TransitionKernel) -> Result<SpectralReport> {
    let method = if kernel.n() <= DENSE_EIGEN_LIMIT {
        EigenMethod::DenseSymmetricEig
    } else {
        EigenMethod::Lanczos
    };
    spectral_gap_with(kernel, method)
}

pub fn spectral_gap_with(kernel: &TransitionKernel, method: EigenMethod) -> Result<SpectralReport> {
    let residual = kernel.detailed_balance_residual();
    if residual > KERNEL_TOLERANCE {
        return Err(VdsError::NotReversible { residual });
    }
    if !kernel.stationary.is_strictly_positive() {
        return Err(VdsError::InvalidDensity(
            "spectral analysis needs a strictly positive stationary density".into(),
        ));
    }
    let sqrt_p: Vec<f64> = kernel.stationary.mass().iter().map(|v| v.sqrt()).collect();
    let lambda2 = match method {
        EigenMethod::DenseSymmetricEig => dense_lambda2(kernel, &sqrt_p)?,
        EigenMethod::Lanczos => lanczos_lambda2(kernel, &sqrt_p),
    };
    let lambda2 = lambda2.clamp(-1.0, 1.0);
    Ok(SpectralReport {
        lambda2,
        gap: 1.0 - lambda2,
        method,
    })
}

fn dense_lambda2(kernel: &TransitionKernel, sqrt_p: &[f64]) -> Result<f64> {
    let n = kernel.n();
    if n == 1 {
        return Ok(1.0);
    }
    let p = kernel.to_dense()?;
    let mut s = DMatrix::from_fn(n, n, |i, j| sqrt_p[i] * p[(i, j)] / sqrt_p[j]);
    // Symmetrize away rounding asymmetry.
    s = (&s + s.transpose()) * 0.5;
    let mut eig: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig[1])
}

/// Largest eigenvalue of the symmetrized kernel on the complement of `√p`
/// (the eigenvector of eigenvalue 1), by Lanczos with full reorthogonalization.
fn lanczos_lambda2(kernel: &TransitionKernel, sqrt_p: &[f64]) -> f64 {
    let n = kernel.n();
    let max_iter = (n - 1).min(300);
    let deflate = |v: &mut [f64]| {
        let d: f64 = v.iter().zip(sqrt_p).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(sqrt_p).for_each(|(a, b)| *a -= d * b);
    };
    let mut rng = rng_from_seed(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    deflate(&mut q);
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.iter_mut().for_each(|v| *v /= norm);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut estimate = f64::NEG_INFINITY;
    for k in 0..max_iter {
        kernel.symmetrized_apply(sqrt_p, &basis[k], &mut w);
        deflate(&mut w);
        let a: f64 = w.iter().zip(&basis[k]).map(|(x, y)| x * y).sum();
        alphas.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = w.iter().map(|v| v * v).sum::<f64>().sqrt();

        let m = alphas.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (idx, &top) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let ritz_residual = (beta * eig.eigenvectors[(m - 1, idx)]).abs();
        estimate = top;
        if beta < 1e-14 || ritz_residual < 1e-12 {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
    estimate
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheegerReport {
    pub gap: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Spectral gap of the uniform random walk on the periodic torus `dims`
/// against the conductance bound `(4/d) n^{-1/d}`.
pub fn verify_cheeger_bound(dims: &GridDims) -> Result<CheegerReport> {
    let side = dims.dims()[0];
    if dims.dims().iter().any(|&s| s != side) || side < 4 {
        return Err(VdsError::InvalidArgument(format!(
            "torus check needs equal even sides of at least 4, got {:?}",
            dims.dims()
        )));
    }
    let d = dims.rank() as f64;
    let kernel = metropolis_kernel(
        &DensityGrid::uniform(dims.clone()),
        Neighborhood::VonNeumann { periodic: true },
    )?;
    let gap = spectral_gap(&kernel)?.gap;
    let bound = 4.0 / d * (dims.len() as f64).powf(-1.0 / d);
    Ok(CheegerReport {
        gap,
        bound,
        holds: gap <= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylCheck {
    pub alpha: f64,
    pub gap: f64,
    pub holds: bool,
}

/// `ε(P^(α)) ≥ α` for each `α`.
pub fn verify_weyl(kernel: &TransitionKernel, alphas: &[f64]) -> Result<Vec<WeylCheck>> {
    alphas
        .iter()
        .map(|&alpha| {
            let gap = spectral_gap(&mix_with_jumps(kernel, alpha)?)?.gap;
            Ok(WeylCheck {
                alpha,
                gap,
                holds: gap >= alpha - 1e-12,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// `‖I - W_m‖∞` (largest entry modulus).
    pub infnorm_residual: f64,
    /// Largest `s ≤ s_max` with residual `< 1/(2s)`, or 0.
    pub max_certified_s: usize,
    pub m: usize,
}

/// Accumulates `W_m = (1/m) Σ_l Θ_{X_l}` with `Θ_i = Re(ā_i a_iᵀ) / p_i`,
/// the real frame `[Re A; Im A]` read one frequency (two real rows) at a time.
pub fn juditsky_certificate(
    model: &AcquisitionModel,
    p: &DensityGrid,
    draw_log: &[usize],
    s_max: usize,
) -> Result<CertificateReport> {
    let n = model.n();
    if n > CERTIFICATE_LIMIT {
        return Err(VdsError::TooLarge {
            n,
            limit: CERTIFICATE_LIMIT,
        });
    }
    model.dims.check_len(p.len())?;
    if draw_log.is_empty() {
        return Err(VdsError::InvalidArgument("empty visit sequence".into()));
    }
    let mut counts = vec![0usize; n];
    for &i in draw_log {
        model.dims.check_index(i)?;
        counts[i] += 1;
    }
    let m = draw_log.len() as f64;
    let mut w = vec![0.0; n * n];
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let pi = p.mass()[i];
        if pi <= 0.0 {
            return Err(VdsError::InvalidDensity(format!(
                "visited cell {i} has zero probability"
            )));
        }
        let row = model.row(i)?;
        let weight = c as f64 / (m * pi);
        for r in 0..n {
            let (ar, ai) = (row[r].re * weight, row[r].im * weight);
            let dst = &mut w[r * n..(r + 1) * n];
            for (cidx, v) in dst.iter_mut().enumerate() {
                *v += ar * row[cidx].re + ai * row[cidx].im;
            }
        }
    }
    let mut residual = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            residual = residual.max((target - w[r * n + c]).abs());
        }
    }
    let max_certified_s = (1..=s_max)
        .take_while(|&s| residual < 1.0 / (2.0 * s as f64))
        .last()
        .unwrap_or(0);
    Ok(CertificateReport {
        infnorm_residual: residual,
        max_certified_s,
        m: draw_log.len(),
    })
}

/// Dense `W_m` for inspection (same accumulation as [`juditsky_certificate`]).
pub fn certificate_matrix(
    model: &AcquisitionModel,
    p: &DensityGrid,
    draw_log: &[usize],
) -> Result<DMatrix<f64>> {
    let n = model.n();
    if n > CERTIFICATE_LIMIT {
        return Err(VdsError::TooLarge {
            n,
            limit: CERTIFICATE_LIMIT,
        });
    }
    let m = draw_log.len() as f64;
    let mut w = DMatrix::zeros(n, n);
    for &i in draw_log {
        let row = model.row(i)?;
        let re = DVector::from_iterator(n, row.iter().map(|z| z.re));
        let im = DVector::from_iterator(n, row.iter().map(|z| z.im));
        let theta = (&re * re.transpose() + &im * im.transpose()) / p.mass()[i];
        w += theta / m;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::polynomial_density;

    fn dims(d: &[usize]) -> GridDims {
        GridDims::new(d.to_vec()).unwrap()
    }

    #[test]
    fn uniform_periodic_kernel_is_the_proposal() {
        let d = dims(&[8, 8]);
        let k = metropolis_kernel(
            &DensityGrid::uniform(d.clone()),
            Neighborhood::VonNeumann { periodic: true },
        )
        .unwrap();
        for i in 0..d.len() {
            assert_eq!(k.local[i].len(), 4);
            for &(_, v) in &k.local[i] {
                assert_eq!(v, 0.25);
            }
        }
    }

    #[test]
    fn two_state_chain_by_hand() {
        let p = DensityGrid::new(dims(&[2]), vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let k = metropolis_kernel(&p, Neighborhood::Complete).unwrap();
        assert!((k.entry(0, 1) - 1.0).abs() < 1e-15);
        assert!(k.entry(0, 0).abs() < 1e-15);
        assert!((k.entry(1, 0) - 0.5).abs() < 1e-15);
        assert!((k.entry(1, 1) - 0.5).abs() < 1e-15);
        assert!(k.stationarity_residual() < 1e-15);
    }

    #[test]
    fn detailed_balance_on_polynomial_density() {
        let p = polynomial_density(&dims(&[8, 8]), 2.0).unwrap();
        for nb in [
            Neighborhood::VonNeumann { periodic: false },
            Neighborhood::VonNeumann { periodic: true },
        ] {
            let k = metropolis_kernel(&p, nb).unwrap();
            assert!(k.detailed_balance_residual() < 1e-12);
            assert!(k.row_sum_residual() < 1e-12);
            assert!(k.stationarity_residual() < 1e-12);
        }
    }

    #[test]
    fn jump_mixing() {
        let p = polynomial_density(&dims(&[8, 8]), 2.0).unwrap();
        let k = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false }).unwrap();
        assert_eq!(mix_with_jumps(&k, 0.0).unwrap(), k);
        let full = mix_with_jumps(&k, 1.0).unwrap();
        for i in [0, 17, 63] {
            for j in 0..64 {
                assert!((full.entry(i, j) - p.mass()[j]).abs() < 1e-15);
            }
        }
        let k1 = mix_with_jumps(&k, 0.1).unwrap();
        assert!(k1.stationarity_residual() < 1e-12);
        // Explicit vector-matrix product against the dense matrix.
        let dense = k1.to_dense().unwrap();
        let pv = DVector::from_column_slice(p.mass());
        let pp = dense.transpose() * &pv;
        assert!((pp - pv).amax() < 1e-12);
        assert!(mix_with_jumps(&k, 1.5).is_err());
        assert!(mix_with_jumps(&k, -0.1).is_err());
    }

    #[test]
    fn metropolis_rejects_zero_mass() {
        let p = DensityGrid::new(dims(&[2]), vec![0.0, 1.0]).unwrap();
        assert!(metropolis_kernel(&p, Neighborhood::Complete).is_err());
    }

    #[test]
    fn absorbing_chain_stays_put() {
        let p = DensityGrid::point_mass(dims(&[2]), 0).unwrap();
        let k = TransitionKernel::from_rows(dims(&[2]), vec![vec![(0, 1.0)], vec![(1, 1.0)]], p)
            .unwrap();
        let s = run_chain(&k, Stop::Draws(100), 4).unwrap();
        assert_eq!(s.omega, vec![0]);
        assert_eq!(s.raw_count(), 100);
    }

    #[test]
    fn from_rows_validates() {
        let p = DensityGrid::uniform(dims(&[2]));
        assert!(TransitionKernel::from_rows(
            dims(&[2]),
            vec![vec![(0, 0.5)], vec![(1, 1.0)]],
            p.clone()
        )
        .is_err());
        let skew = DensityGrid::new(dims(&[2]), vec![0.25, 0.75]).unwrap();
        assert!(TransitionKernel::from_rows(
            dims(&[2]),
            vec![vec![(1, 1.0)], vec![(0, 1.0)]],
            skew
        )
        .is_err());
    }

    #[test]
    fn chain_stops_at_distinct_target_or_errors() {
        let p = polynomial_density(&dims(&[16, 16]), 2.0).unwrap();
        let k = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false }).unwrap();
        let s = run_chain(&k, Stop::distinct(50, 256), 8).unwrap();
        assert_eq!(s.m(), 50);
        assert_eq!(*s.draw_log.last().unwrap(), *s.omega.last().unwrap());
        for w in s.draw_log.windows(2) {
            assert!(w[0] == w[1] || k.entry(w[0], w[1]) > 0.0);
        }
        match run_chain(
            &k,
            Stop::Distinct {
                target: 200,
                max_draws: 30,
            },
            8,
        ) {
            Err(VdsError::BudgetExhausted { partial, .. }) => assert_eq!(partial.raw_count(), 30),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spectral_gap_closed_forms() {
        let d = dims(&[4, 4]);
        let p = polynomial_density(&d, 1.0).unwrap();
        let k = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false }).unwrap();
        let jump = mix_with_jumps(&k, 1.0).unwrap();
        let r = spectral_gap(&jump).unwrap();
        assert!(r.lambda2.abs() < 1e-12);
        assert!((r.gap - 1.0).abs() < 1e-12);

        let id_rows = (0..16).map(|i| vec![(i, 1.0)]).collect();
        let ident = TransitionKernel::from_rows(d.clone(), id_rows, p.clone()).unwrap();
        assert!(spectral_gap(&ident).unwrap().gap.abs() < 1e-12);

        for beta in [0.1, 0.3, 0.9] {
            let u = DensityGrid::uniform(dims(&[2]));
            let rows = vec![
                vec![(0, 1.0 - beta), (1, beta)],
                vec![(0, beta), (1, 1.0 - beta)],
            ];
            let k2 = TransitionKernel::from_rows(dims(&[2]), rows, u).unwrap();
            let r = spectral_gap(&k2).unwrap();
            assert!((r.gap - 2.0 * beta).abs() < 1e-12, "beta {beta}: {r:?}");
        }
    }

    #[test]
    fn torus_gap_matches_cosine_formula() {
        // Simple random walk on the h×h torus: λ₂ = (1 + cos(2π/h)) / 2.
        for h in [4usize, 8] {
            let d = dims(&[h, h]);
            let k = metropolis_kernel(
                &DensityGrid::uniform(d),
                Neighborhood::VonNeumann { periodic: true },
            )
            .unwrap();
            let r = spectral_gap(&k).unwrap();
            let expected = (1.0 - (2.0 * std::f64::consts::PI / h as f64).cos()) / 2.0;
            assert!((r.gap - expected).abs() < 1e-10, "{h}: {r:?}");
        }
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let p = polynomial_density(&dims(&[16, 16]), 2.0).unwrap();
        let k = metropolis_kernel(&p, Neighborhood::VonNeumann { periodic: false }).unwrap();
        for alpha in [0.0, 0.05] {
            let kk = mix_with_jumps(&k, alpha).unwrap();
            let dense = spectral_gap_with(&kk, EigenMethod::DenseSymmetricEig).unwrap();
            let lanczos = spectral_gap_with(&kk, EigenMethod::Lanczos).unwrap();
            assert!(
                (dense.lambda2 - lanczos.lambda2).abs() < 1e-8,
                "{dense:?} {lanczos:?}"
            );
        }
    }

    #[test]
    fn non_reversible_kernel_rejected() {
        // Deterministic 3-cycle: uniform is stationary but detailed balance fails.
        let u = DensityGrid::from_weights(dims(&[4]), vec![1.0; 4]).unwrap();
        let rows = vec![
            vec![(1, 1.0)],
            vec![(2, 1.0)],
            vec![(3, 1.0)],
            vec![(0, 1.0)],
        ];
        let k = TransitionKernel::from_rows(dims(&[4]), rows, u).unwrap();
        assert!(matches!(
            spectral_gap(&k),
            Err(VdsError::NotReversible { .. })
        ));
    }

    #[test]
    fn cheeger_rejects_non_torus() {
        assert!(verify_cheeger_bound(&dims(&[8, 16])).is_err());
        assert!(verify_cheeger_bound(&dims(&[2, 2])).is_err());
    }

    #[test]
    fn coo_export_lists_nonzeros() {
        let p = DensityGrid::new(dims(&[2]), vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let k = metropolis_kernel(&p, Neighborhood::Complete).unwrap();
        let text = k.to_coo_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# n=2 alpha=0");
        assert_eq!(lines.len(), 4);
        assert!(lines.contains(&"0 1 1e0"));
    }
}
