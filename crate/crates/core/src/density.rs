//! Target sampling densities, the coherence constant `K(A, p)` and the
//! measurement-count bounds built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VdsError};
use crate::grid::{GridDims, RealGrid};
use crate::transforms::AcquisitionModel;

/// Tolerance on the total mass of a [`DensityGrid`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability mass function on the cells of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    dims: GridDims,
    mass: Vec<f64>,
}

impl DensityGrid {
    /// Wraps an already-normalized mass vector.
    pub fn new(dims: GridDims, mass: Vec<f64>) -> Result<Self> {
        dims.check_len(mass.len())?;
        if let Some(bad) = mass.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(VdsError::InvalidDensity(format!(
                "entry {bad} is not a nonnegative number"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(VdsError::InvalidDensity(format!(
                "total mass {total} is not 1"
            )));
        }
        Ok(Self { dims, mass })
    }

    /// Normalizes nonnegative weights into a density.
    pub fn from_weights(dims: GridDims, weights: Vec<f64>) -> Result<Self> {
        dims.check_len(weights.len())?;
        if let Some(bad) = weights.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(VdsError::InvalidDensity(format!(
                "weight {bad} is not a nonnegative number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(VdsError::InvalidDensity("weights have no mass".into()));
        }
        let mass = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { dims, mass })
    }

    pub fn uniform(dims: GridDims) -> Self {
        let n = dims.len();
        Self {
            dims,
            mass: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(dims: GridDims, index: usize) -> Result<Self> {
        dims.check_index(index)?;
        let mut mass = vec![0.0; dims.len()];
        mass[index] = 1.0;
        Ok(Self { dims, mass })
    }

    pub fn dims(&self) -> &GridDims {
        &self.dims
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.mass.iter().all(|&v| v > 0.0)
    }

    /// `normalize(p^exponent)`.
    pub fn powered(&self, exponent: f64) -> Result<Self> {
        Self::from_weights(
            self.dims.clone(),
            self.mass
                .iter()
                .map(|&v| if v > 0.0 { v.powf(exponent) } else { 0.0 })
                .collect(),
        )
    }

    pub fn to_grid(&self) -> RealGrid {
        RealGrid {
            dims: self.dims.clone(),
            data: self.mass.clone(),
        }
    }

    /// Reads a density from a grid, renormalizing.
    pub fn from_grid(grid: &RealGrid) -> Result<Self> {
        Self::from_weights(grid.dims.clone(), grid.data.clone())
    }
}

/// `π_i = ‖a_i‖∞² / Σ_j ‖a_j‖∞²`, the minimizer of `K(A, ·)`.
pub fn optimal_density(model: &AcquisitionModel) -> DensityGrid {
    DensityGrid::from_weights(
        model.dims.clone(),
        model.row_infnorms.data.iter().map(|v| v * v).collect(),
    )
    .expect("row norms are positive")
}

/// `p(k) ∝ |k|^{-exponent}` on centered frequencies. The DC cell gets the
/// value of `|k| = 1`.
pub fn polynomial_density(dims: &GridDims, exponent: f64) -> Result<DensityGrid> {
    if !(exponent >= 0.0) || !exponent.is_finite() {
        return Err(VdsError::InvalidArgument(format!(
            "decay exponent must be >= 0, got {exponent}"
        )));
    }
    let weights = (0..dims.len())
        .map(|i| dims.frequency_norm(i).max(1.0).powf(-exponent))
        .collect();
    DensityGrid::from_weights(dims.clone(), weights)
}

/// `K(A, p) = max_k ‖a_k‖∞² / p_k`.
pub fn k_value(model: &AcquisitionModel, p: &DensityGrid) -> Result<f64> {
    k_value_excluding(model, p, &[])
}

/// `K(A_{Ω₁ᶜ}, p)`: the maximum ratio over rows outside `excluded`.
pub fn k_value_excluding(
    model: &AcquisitionModel,
    p: &DensityGrid,
    excluded: &[usize],
) -> Result<f64> {
    model.dims.check_len(p.len())?;
    let mut skip = vec![false; p.len()];
    for &i in excluded {
        model.dims.check_index(i)?;
        skip[i] = true;
    }
    let mut k = 0.0f64;
    for (i, (&a, &pi)) in model.row_infnorms.data.iter().zip(p.mass()).enumerate() {
        if skip[i] {
            continue;
        }
        let a2 = a * a;
        if pi <= 0.0 {
            if a2 > 0.0 {
                return Err(VdsError::InvalidDensity(format!(
                    "cell {i} has zero probability but a nonzero row"
                )));
            }
            continue;
        }
        k = k.max(a2 / pi);
    }
    Ok(k)
}

/// Indices of the `m1` rows with the largest `‖a_i‖∞`. Norms equal to 12
/// significant digits tie, and ties go to the lower index.
pub fn deterministic_set(model: &AcquisitionModel, m1: usize) -> Result<Vec<usize>> {
    let n = model.n();
    if m1 > n {
        return Err(VdsError::InvalidArgument(format!(
            "m1 = {m1} exceeds n = {n}"
        )));
    }
    Ok(coherence_order(&model.row_infnorms.data)[..m1].to_vec())
}

/// All indices sorted by decreasing row norm (ties by ascending index).
pub fn coherence_order(norms: &[f64]) -> Vec<usize> {
    let scale = norms
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let key = |v: f64| (v / scale * 1e12).round() as i64;
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&a, &b| key(norms[b]).cmp(&key(norms[a])).then(a.cmp(&b)));
    order
}

/// Zeroes `excluded` and renormalizes the rest.
pub fn restrict_and_renormalize(p: &DensityGrid, excluded: &[usize]) -> Result<DensityGrid> {
    if excluded.is_empty() {
        return Ok(p.clone());
    }
    let mut w = p.mass().to_vec();
    for &i in excluded {
        p.dims().check_index(i)?;
        w[i] = 0.0;
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(VdsError::InvalidDensity(
            "all mass lies in the excluded set".into(),
        ));
    }
    DensityGrid::from_weights(p.dims().clone(), w)
}

/// Constant of the independent-drawing bound.
pub const IID_CONSTANT: f64 = 26.25;
/// Constant of the mixed deterministic + independent bound.
pub const MIXED_CONSTANT: f64 = 7.0 / 3.0;
/// Constant of the Markov-chain bound.
pub const MARKOV_CONSTANT: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Iid,
    Mixed,
    Markov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub k: f64,
    /// Real-valued; callers round up.
    pub m_required: f64,
    pub n: usize,
    pub s: usize,
    pub eta: f64,
    pub m1: Option<usize>,
    pub epsilon: Option<f64>,
}

fn check_bound_inputs(n: usize, k: f64, s: usize, eta: f64) -> Result<()> {
    if n == 0 || s == 0 || !(k > 0.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(VdsError::InvalidArgument(format!(
            "bound needs n >= 1, s >= 1, K > 0 and 0 < eta < 1 (n={n}, s={s}, K={k}, eta={eta})"
        )));
    }
    Ok(())
}

/// `m ≥ C K s ln²(6n/η)` with `C = 26.25`.
pub fn bound_iid(n: usize, k: f64, s: usize, eta: f64) -> Result<BoundReport> {
    check_bound_inputs(n, k, s, eta)?;
    let log = (6.0 * n as f64 / eta).ln();
    Ok(BoundReport {
        kind: BoundKind::Iid,
        k,
        m_required: IID_CONSTANT * k * s as f64 * log * log,
        n,
        s,
        eta,
        m1: None,
        epsilon: None,
    })
}

/// `m ≥ m₁ + (7/3) K(A_{Ω₁ᶜ}, p) s ln²(6n/η)`.
pub fn bound_mixed(
    n: usize,
    k_restricted: f64,
    m1: usize,
    s: usize,
    eta: f64,
) -> Result<BoundReport> {
    check_bound_inputs(n, k_restricted, s, eta)?;
    let log = (6.0 * n as f64 / eta).ln();
    Ok(BoundReport {
        kind: BoundKind::Mixed,
        k: k_restricted,
        m_required: m1 as f64 + MIXED_CONSTANT * k_restricted * s as f64 * log * log,
        n,
        s,
        eta,
        m1: Some(m1),
        epsilon: None,
    })
}

/// `m ≥ (12/ε) K² s² log(2n²/η)`.
pub fn bound_markov(n: usize, k: f64, s: usize, eta: f64, epsilon: f64) -> Result<BoundReport> {
    check_bound_inputs(n, k, s, eta)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(VdsError::InvalidArgument(format!(
            "spectral gap must lie in (0, 1], got {epsilon}"
        )));
    }
    let log = (2.0 * (n as f64).powi(2) / eta).ln();
    let s = s as f64;
    Ok(BoundReport {
        kind: BoundKind::Markov,
        k,
        m_required: MARKOV_CONSTANT / epsilon * k * k * s * s * log,
        n,
        s: s as usize,
        eta,
        m1: None,
        epsilon: Some(epsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::WaveletSpec;
    use num_complex::Complex64;

    fn dims(d: &[usize]) -> GridDims {
        GridDims::new(d.to_vec()).unwrap()
    }

    #[test]
    fn density_validation() {
        assert!(DensityGrid::new(dims(&[2]), vec![0.5, 0.6]).is_err());
        assert!(DensityGrid::new(dims(&[2]), vec![-0.5, 1.5]).is_err());
        assert!(DensityGrid::from_weights(dims(&[2]), vec![0.0, 0.0]).is_err());
        let p = DensityGrid::from_weights(dims(&[2]), vec![1.0, 3.0]).unwrap();
        assert_eq!(p.mass(), &[0.25, 0.75]);
    }

    #[test]
    fn polynomial_density_shape() {
        let d = dims(&[4, 4]);
        let flat = polynomial_density(&d, 0.0).unwrap();
        assert!(flat.mass().iter().all(|&v| (v - 1.0 / 16.0).abs() < 1e-15));

        let p = polynomial_density(&d, 2.0).unwrap();
        // (row, col) = (2, 3) is k = (0, 1); (2, 0) is k = (0, -2).
        let one = p.mass()[d.ravel(&[2, 3])];
        let two = p.mass()[d.ravel(&[2, 0])];
        assert!((one / two - 4.0).abs() < 1e-12);
        assert_eq!(p.mass()[d.dc_index()], one);
        assert!(polynomial_density(&d, -1.0).is_err());
    }

    #[test]
    fn polynomial_density_golden_4x4() {
        // Weights 1/max(|k|,1)^2 evaluated by hand on k ∈ {-2..1}².
        let d = dims(&[4, 4]);
        let p = polynomial_density(&d, 2.0).unwrap();
        let mut w = Vec::new();
        for kx in -2i32..2 {
            for ky in -2i32..2 {
                let r2 = (kx * kx + ky * ky) as f64;
                w.push(1.0 / r2.max(1.0));
            }
        }
        let total: f64 = w.iter().sum();
        assert!((total - 8.425).abs() < 1e-12);
        for (a, b) in p.mass().iter().zip(&w) {
            assert!((a - b / total).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_fourier_is_uniform_with_unit_k() {
        let m = AcquisitionModel::new(dims(&[8, 8]), WaveletSpec::identity()).unwrap();
        let pi = optimal_density(&m);
        assert!(pi.mass().iter().all(|&v| (v - 1.0 / 64.0).abs() < 1e-15));
        assert!((k_value(&m, &pi).unwrap() - 1.0).abs() < 1e-12);
        let u = DensityGrid::uniform(dims(&[8, 8]));
        assert!((k_value(&m, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_n2_matches_dense_matrix() {
        // n = 2, one Haar level: Ψ = [[1,1],[1,-1]]/√2, F = [[1,1],[1,-1]]/√2,
        // so A = FΨ = I and both rows have ‖a_i‖∞ = 1. Centered index 0 is k = -1.
        let d = dims(&[2]);
        let m = AcquisitionModel::new(d, WaveletSpec::haar(1)).unwrap();
        let mut dense = [[Complex64::default(); 2]; 2];
        for j in 0..2 {
            let mut e = vec![Complex64::default(); 2];
            e[j] = Complex64::new(1.0, 0.0);
            let col = m.apply(&e).unwrap();
            for i in 0..2 {
                dense[i][j] = col[i];
            }
        }
        for i in 0..2 {
            let brute = dense[i].iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((m.row_infnorms.data[i] - brute).abs() < 1e-14);
            assert!((brute - 1.0).abs() < 1e-14);
        }
        let pi = optimal_density(&m);
        assert!((pi.mass()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn k_value_rejects_zero_cells() {
        let m = AcquisitionModel::new(dims(&[4]), WaveletSpec::identity()).unwrap();
        let p = DensityGrid::point_mass(dims(&[4]), 1).unwrap();
        assert!(k_value(&m, &p).is_err());
        assert!((k_value_excluding(&m, &p, &[0, 2, 3]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn deterministic_set_edges_and_monotone() {
        let m = AcquisitionModel::new(dims(&[8, 8]), WaveletSpec::haar(2)).unwrap();
        assert!(deterministic_set(&m, 0).unwrap().is_empty());
        let all = deterministic_set(&m, 64).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, (0..64).collect::<Vec<_>>());
        assert!(deterministic_set(&m, 65).is_err());
        for m1 in 0..64 {
            let a = deterministic_set(&m, m1).unwrap();
            let b = deterministic_set(&m, m1 + 1).unwrap();
            assert_eq!(&b[..m1], &a[..]);
        }
    }

    #[test]
    fn restriction() {
        let d = dims(&[4]);
        let u = DensityGrid::uniform(d.clone());
        assert_eq!(restrict_and_renormalize(&u, &[]).unwrap(), u);
        let r = restrict_and_renormalize(&u, &[0, 1]).unwrap();
        assert_eq!(r.mass(), &[0.0, 0.0, 0.5, 0.5]);
        assert!(restrict_and_renormalize(&u, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn bounds_plug_in() {
        let n = 64;
        let eta = 0.01;
        let l = (6.0 * n as f64 / eta).ln();
        let iid = bound_iid(n, 1.0, 1, eta).unwrap();
        assert!((iid.m_required / (l * l) - 26.25).abs() < 1e-12);
        let mixed = bound_mixed(n, 1.0, 0, 1, eta).unwrap();
        assert!((mixed.m_required / (l * l) - 7.0 / 3.0).abs() < 1e-12);
        let mixed5 = bound_mixed(n, 1.0, 5, 1, eta).unwrap();
        assert!((mixed5.m_required - mixed.m_required - 5.0).abs() < 1e-12);
        let lm = (2.0 * (n * n) as f64 / eta).ln();
        let mk = bound_markov(n, 1.0, 1, eta, 1.0).unwrap();
        assert!((mk.m_required / lm - 12.0).abs() < 1e-12);
        let mk2 = bound_markov(n, 2.0, 3, eta, 0.5).unwrap();
        assert!((mk2.m_required - 12.0 / 0.5 * 4.0 * 9.0 * lm).abs() < 1e-9);
        assert!(bound_iid(n, 1.0, 0, eta).is_err());
        assert!(bound_iid(n, 1.0, 1, 1.0).is_err());
        assert!(bound_markov(n, 1.0, 1, eta, 0.0).is_err());
        assert!(bound_markov(n, 1.0, 1, eta, 1.5).is_err());
    }

    #[test]
    fn mixed_congruent_with_iid() {
        for (k, s, eta) in [(1.0, 1, 0.1), (3.5, 7, 0.01), (12.0, 2, 0.5)] {
            let iid = bound_iid(256, k, s, eta).unwrap();
            let mixed = bound_mixed(256, k, 0, s, eta).unwrap();
            assert!(
                (iid.m_required / IID_CONSTANT - mixed.m_required / MIXED_CONSTANT).abs() < 1e-9
            );
        }
    }
}
