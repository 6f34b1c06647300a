use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::{ComplexGrid, GridDims};

/// Unitary d-dimensional DFT in standard (non-centered) layout.
///
/// Forward: `X[k] = n^{-1/2} Σ_x x[x] exp(-2πi k·x / dims)`.
#[derive(Clone)]
pub struct Fourier {
    dims: GridDims,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    scale: f64,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("dims", &self.dims).finish()
    }
}

impl Fourier {
    pub fn new(dims: &GridDims) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims
            .dims()
            .iter()
            .map(|&d| planner.plan_fft_forward(d))
            .collect();
        let inverse = dims
            .dims()
            .iter()
            .map(|&d| planner.plan_fft_inverse(d))
            .collect();
        Self {
            dims: dims.clone(),
            forward,
            inverse,
            scale: 1.0 / (dims.len() as f64).sqrt(),
        }
    }

    pub fn dims(&self) -> &GridDims {
        &self.dims
    }

    pub fn forward(&self, data: &mut [Complex64]) -> Result<()> {
        self.run(data, &self.forward)
    }

    pub fn inverse(&self, data: &mut [Complex64]) -> Result<()> {
        self.run(data, &self.inverse)
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) -> Result<()> {
        self.dims.check_len(data.len())?;
        let shape = self.dims.dims();
        let strides = self.dims.strides();
        let n = data.len();
        for (axis, plan) in plans.iter().enumerate() {
            let len = shape[axis];
            let stride = strides[axis];
            let mut line = vec![Complex64::default(); len];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            // Lines along `axis` start at every index whose coordinate on that axis is 0.
            for start in (0..n).filter(|i| (i / stride).is_multiple_of(len)) {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
        for v in data.iter_mut() {
            *v *= self.scale;
        }
        Ok(())
    }
}

pub fn fft_forward(grid: &ComplexGrid) -> Result<ComplexGrid> {
    let mut out = grid.clone();
    Fourier::new(&grid.dims).forward(&mut out.data)?;
    Ok(out)
}

pub fn fft_inverse(grid: &ComplexGrid) -> Result<ComplexGrid> {
    let mut out = grid.clone();
    Fourier::new(&grid.dims).inverse(&mut out.data)?;
    Ok(out)
}
