//! Periodized orthogonal wavelet transforms (separable Mallat pyramid).

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdsError};
use crate::grid::{GridDims, RealGrid};

/// Least-asymmetric Daubechies filter with 10 vanishing moments (20 taps),
/// synthesis lowpass.
pub const SYMMLET10: [f64; 20] = [
    -0.0004593294210046588,
    5.7036083618494284e-05,
    0.004593173585311828,
    -0.0008043589320165449,
    -0.02035493981231129,
    0.005764912033581909,
    0.04999497207737669,
    -0.0319900568824278,
    -0.03553674047381755,
    0.38382676106708546,
    0.7695100370211071,
    0.47169066693843925,
    -0.07088053578324385,
    -0.15949427888491757,
    0.011609893903711381,
    0.0459272392310922,
    -0.0014653825813050513,
    -0.008641299277022422,
    9.563267072289475e-05,
    0.0007701598091144901,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "taps")]
pub enum WaveletFamily {
    /// The canonical (Dirac) basis: Ψ = I.
    Identity,
    Haar,
    Symmlet10,
    CustomOrthogonal(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub levels: usize,
}

impl WaveletSpec {
    pub fn identity() -> Self {
        Self {
            family: WaveletFamily::Identity,
            levels: 0,
        }
    }

    pub fn haar(levels: usize) -> Self {
        Self {
            family: WaveletFamily::Haar,
            levels,
        }
    }

    pub fn symmlet10(levels: usize) -> Self {
        Self {
            family: WaveletFamily::Symmlet10,
            levels,
        }
    }

    pub fn custom(taps: Vec<f64>, levels: usize) -> Self {
        Self {
            family: WaveletFamily::CustomOrthogonal(taps),
            levels,
        }
    }
}

/// Scalars the filter bank can act on (real images, complex coefficient vectors).
pub trait FilterScalar:
    Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
}
impl FilterScalar for f64 {}
impl FilterScalar for Complex64 {}

/// A validated orthonormal two-channel filter bank bound to a grid.
#[derive(Clone, Debug)]
pub struct Wavelet {
    dims: GridDims,
    levels: usize,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl Wavelet {
    pub fn new(spec: &WaveletSpec, dims: &GridDims) -> Result<Self> {
        let lowpass = match &spec.family {
            WaveletFamily::Identity => {
                return Ok(Self {
                    dims: dims.clone(),
                    levels: 0,
                    lowpass: vec![],
                    highpass: vec![],
                })
            }
            WaveletFamily::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            WaveletFamily::Symmlet10 => SYMMLET10.to_vec(),
            WaveletFamily::CustomOrthogonal(taps) => taps.clone(),
        };
        if spec.levels == 0 {
            return Err(VdsError::Wavelet("levels must be positive".into()));
        }
        let max_levels = dims.min_dim().trailing_zeros() as usize;
        if spec.levels > max_levels {
            return Err(VdsError::Wavelet(format!(
                "{} levels requested but the smallest side {} allows at most {max_levels}",
                spec.levels,
                dims.min_dim()
            )));
        }
        let highpass = quadrature_mirror(&lowpass);
        check_orthonormal(&lowpass, &highpass)?;
        Ok(Self {
            dims: dims.clone(),
            levels: spec.levels,
            lowpass,
            highpass,
        })
    }

    pub fn dims(&self) -> &GridDims {
        &self.dims
    }

    pub fn is_identity(&self) -> bool {
        self.levels == 0
    }

    /// Analysis: image -> coefficients (Ψᵀ).
    pub fn forward<T: FilterScalar>(&self, data: &mut [T]) -> Result<()> {
        self.dims.check_len(data.len())?;
        for level in 0..self.levels {
            let block = self.block(level);
            for axis in 0..self.dims.rank() {
                self.along_axis(data, &block, axis, |line, out| {
                    analyze(line, out, &self.lowpass, &self.highpass)
                });
            }
        }
        Ok(())
    }

    /// Synthesis: coefficients -> image (Ψ).
    pub fn inverse<T: FilterScalar>(&self, data: &mut [T]) -> Result<()> {
        self.dims.check_len(data.len())?;
        for level in (0..self.levels).rev() {
            let block = self.block(level);
            for axis in (0..self.dims.rank()).rev() {
                self.along_axis(data, &block, axis, |line, out| {
                    synthesize(line, out, &self.lowpass, &self.highpass)
                });
            }
        }
        Ok(())
    }

    fn block(&self, level: usize) -> Vec<usize> {
        self.dims.dims().iter().map(|d| d >> level).collect()
    }

    fn along_axis<T: FilterScalar>(
        &self,
        data: &mut [T],
        block: &[usize],
        axis: usize,
        op: impl Fn(&[T], &mut [T]),
    ) {
        let strides = self.dims.strides();
        let len = block[axis];
        let mut line = vec![T::default(); len];
        let mut out = vec![T::default(); len];
        // Iterate over every coordinate of the block with axis coordinate fixed at 0.
        let mut other: Vec<usize> = block.to_vec();
        other[axis] = 1;
        let count: usize = other.iter().product();
        let mut coords = vec![0usize; block.len()];
        for c in 0..count {
            let mut rem = c;
            for a in (0..block.len()).rev() {
                coords[a] = rem % other[a];
                rem /= other[a];
            }
            let start: usize = coords.iter().zip(&strides).map(|(c, s)| c * s).sum();
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[start + j * strides[axis]];
            }
            op(&line, &mut out);
            for (j, v) in out.iter().enumerate() {
                data[start + j * strides[axis]] = *v;
            }
        }
    }
}

/// `g[k] = (-1)^k h[L-1-k]`.
fn quadrature_mirror(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l)
        .map(|k| {
            if k % 2 == 0 {
                h[l - 1 - k]
            } else {
                -h[l - 1 - k]
            }
        })
        .collect()
}

fn check_orthonormal(h: &[f64], g: &[f64]) -> Result<()> {
    if h.len() < 2 || !h.len().is_multiple_of(2) {
        return Err(VdsError::Wavelet(format!(
            "filter length must be even and >= 2, got {}",
            h.len()
        )));
    }
    // Double-shift orthonormality of the infinite filter bank.
    for shift in (0..h.len()).step_by(2) {
        let hh: f64 = (0..h.len() - shift).map(|k| h[k] * h[k + shift]).sum();
        let target = if shift == 0 { 1.0 } else { 0.0 };
        if (hh - target).abs() > 1e-10 {
            return Err(VdsError::Wavelet(format!(
                "lowpass is not orthonormal at shift {shift} (inner product {hh:.3e})"
            )));
        }
    }
    let dc: f64 = h.iter().sum();
    if (dc - std::f64::consts::SQRT_2).abs() > 1e-10 {
        return Err(VdsError::Wavelet(format!(
            "lowpass must sum to sqrt(2), got {dc}"
        )));
    }
    // Periodized bank on short lines: synthesize the dense 1D analysis matrix
    // and require WᵀW = I.
    let mut len = 2;
    while len <= 2 * h.len() {
        let w = dense_analysis(h, g, len);
        for i in 0..len {
            for j in 0..len {
                let dot: f64 = (0..len).map(|r| w[r * len + i] * w[r * len + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot - target).abs() > 1e-10 {
                    return Err(VdsError::Wavelet(format!(
                        "periodized filter bank is not orthonormal on length {len}"
                    )));
                }
            }
        }
        len *= 2;
    }
    Ok(())
}

fn dense_analysis(h: &[f64], g: &[f64], len: usize) -> Vec<f64> {
    let half = len / 2;
    let mut w = vec![0.0; len * len];
    for i in 0..half {
        for k in 0..h.len() {
            let col = (2 * i + k) % len;
            w[i * len + col] += h[k];
            w[(half + i) * len + col] += g[k];
        }
    }
    w
}

fn analyze<T: FilterScalar>(x: &[T], out: &mut [T], h: &[f64], g: &[f64]) {
    let n = x.len();
    let half = n / 2;
    for i in 0..half {
        let mut a = T::default();
        let mut d = T::default();
        for k in 0..h.len() {
            let v = x[(2 * i + k) % n];
            a = a + v * h[k];
            d = d + v * g[k];
        }
        out[i] = a;
        out[half + i] = d;
    }
}

fn synthesize<T: FilterScalar>(c: &[T], out: &mut [T], h: &[f64], g: &[f64]) {
    let n = c.len();
    let half = n / 2;
    out.iter_mut().for_each(|v| *v = T::default());
    for i in 0..half {
        let a = c[i];
        let d = c[half + i];
        for k in 0..h.len() {
            let idx = (2 * i + k) % n;
            out[idx] = out[idx] + a * h[k] + d * g[k];
        }
    }
}

pub fn wavelet_forward(grid: &RealGrid, spec: &WaveletSpec) -> Result<RealGrid> {
    let w = Wavelet::new(spec, &grid.dims)?;
    let mut out = grid.clone();
    w.forward(&mut out.data)?;
    Ok(out)
}

pub fn wavelet_inverse(grid: &RealGrid, spec: &WaveletSpec) -> Result<RealGrid> {
    let w = Wavelet::new(spec, &grid.dims)?;
    let mut out = grid.clone();
    w.inverse(&mut out.data)?;
    Ok(out)
}
