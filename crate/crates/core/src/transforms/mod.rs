//! Unitary FFT, orthogonal wavelets and the acquisition operator `A = F Ψ`.

mod acquisition;
mod fft;
mod wavelet;

pub use acquisition::{compute_row_infnorms, AcquisitionModel};
pub use fft::{fft_forward, fft_inverse, Fourier};
pub use wavelet::{
    wavelet_forward, wavelet_inverse, FilterScalar, Wavelet, WaveletFamily, WaveletSpec, SYMMLET10,
};
