use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::Fourier;
use super::wavelet::{Wavelet, WaveletSpec};
use crate::error::Result;
use crate::grid::{shift_to_centered, shift_to_fft, GridDims, RealGrid};

/// The acquisition operator `A = F Ψ` (wavelet synthesis followed by the
/// unitary DFT), with measurements indexed in the centered k-space layout.
#[derive(Clone, Debug)]
pub struct AcquisitionModel {
    pub dims: GridDims,
    pub wavelet: WaveletSpec,
    /// `‖a_i‖∞` for every centered frequency index `i`.
    pub row_infnorms: RealGrid,
    fourier: Fourier,
    filter: Wavelet,
}

impl AcquisitionModel {
    pub fn new(dims: GridDims, wavelet: WaveletSpec) -> Result<Self> {
        let filter = Wavelet::new(&wavelet, &dims)?;
        let fourier = Fourier::new(&dims);
        let row_infnorms = infnorms_of(&dims, &filter);
        Ok(Self {
            dims,
            wavelet,
            row_infnorms,
            fourier,
            filter,
        })
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    pub fn filter(&self) -> &Wavelet {
        &self.filter
    }

    /// Coefficients -> centered k-space samples.
    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.dims.check_len(z.len())?;
        let mut image = z.to_vec();
        self.filter.inverse(&mut image)?;
        self.fourier.forward(&mut image)?;
        Ok(shift_to_centered(&self.dims, &image))
    }

    /// Centered k-space samples -> coefficients.
    pub fn adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.dims.check_len(y.len())?;
        let mut image = shift_to_fft(&self.dims, y);
        self.fourier.inverse(&mut image)?;
        self.filter.forward(&mut image)?;
        Ok(image)
    }

    /// Row `i` of `A` (centered index), as a length-n complex vector.
    pub fn row(&self, index: usize) -> Result<Vec<Complex64>> {
        self.dims.check_index(index)?;
        let mut atom = fourier_row(&self.dims, index);
        self.filter.forward(&mut atom)?;
        Ok(atom)
    }

    /// Synthesizes an image from coefficients (`Ψ z`).
    pub fn synthesize(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut image = z.to_vec();
        self.filter.inverse(&mut image)?;
        Ok(image)
    }

    /// Analyses an image into coefficients (`Ψᵀ x`).
    pub fn analyze(&self, image: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut z = image.to_vec();
        self.filter.forward(&mut z)?;
        Ok(z)
    }
}

/// Row `i` of the unitary DFT matrix for centered frequency index `i`:
/// `x ↦ n^{-1/2} exp(-2πi k·x/dims)`.
fn fourier_row(dims: &GridDims, index: usize) -> Vec<Complex64> {
    let k = dims.frequency(index);
    let scale = 1.0 / (dims.len() as f64).sqrt();
    let shape = dims.dims();
    (0..dims.len())
        .map(|j| {
            let x = dims.unravel(j);
            let phase: f64 = (0..shape.len())
                .map(|a| (k[a] * x[a] as i64).rem_euclid(shape[a] as i64) as f64 / shape[a] as f64)
                .sum();
            Complex64::from_polar(scale, -2.0 * std::f64::consts::PI * phase)
        })
        .collect()
}

fn infnorms_of(dims: &GridDims, filter: &Wavelet) -> RealGrid {
    let data: Vec<f64> = (0..dims.len())
        .into_par_iter()
        .map(|i| {
            let mut atom = fourier_row(dims, i);
            filter.forward(&mut atom).expect("atom has grid length");
            atom.iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .collect();
    RealGrid {
        dims: dims.clone(),
        data,
    }
}

/// `‖a_i‖∞` for every row of `A = F Ψ`, in centered layout.
pub fn compute_row_infnorms(dims: &GridDims, wavelet: &WaveletSpec) -> Result<RealGrid> {
    let filter = Wavelet::new(wavelet, dims)?;
    Ok(infnorms_of(dims, &filter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    }

    #[test]
    fn identity_rows_are_flat() {
        let dims = GridDims::new(vec![8, 8]).unwrap();
        let m = AcquisitionModel::new(dims, WaveletSpec::identity()).unwrap();
        for v in &m.row_infnorms.data {
            assert!((v - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn adjoint_identity_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = GridDims::new(vec![16, 8]).unwrap();
        let m = AcquisitionModel::new(dims, WaveletSpec::symmlet10(2)).unwrap();
        for _ in 0..10 {
            let x = random_vec(m.n(), &mut rng);
            let y = random_vec(m.n(), &mut rng);
            let ax = m.apply(&x).unwrap();
            let aty = m.adjoint(&y).unwrap();
            assert!((inner(&ax, &y) - inner(&x, &aty)).norm() < 1e-10);
            let back = m.adjoint(&ax).unwrap();
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn row_matches_apply_on_basis() {
        let dims = GridDims::new(vec![8, 8]).unwrap();
        let m = AcquisitionModel::new(dims, WaveletSpec::haar(2)).unwrap();
        let n = m.n();
        for j in [0, 9, 37, 63] {
            let mut e = vec![Complex64::default(); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = m.apply(&e).unwrap();
            for i in [0, 27, 36, 50] {
                let row = m.row(i).unwrap();
                assert!((row[j] - col[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let dims = GridDims::new(vec![4, 4]).unwrap();
        let m = AcquisitionModel::new(dims, WaveletSpec::haar(1)).unwrap();
        assert!(m.apply(&[Complex64::default(); 15]).is_err());
        assert!(m.adjoint(&[Complex64::default(); 17]).is_err());
    }
}
