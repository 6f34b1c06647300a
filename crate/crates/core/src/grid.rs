//! Cartesian grids, centered frequency indexing and the `VDSG` binary format.
//!
//! Every grid is stored row-major (last axis fastest). Frequency-domain grids
//! use the *centered* layout: along an axis of length `dim`, stored index `j`
//! corresponds to the frequency `k = j - dim/2`, so DC sits at `dim/2`. The
//! FFT routines work in the standard layout (`k mod dim`); [`shift_to_fft`]
//! and [`shift_to_centered`] convert between the two.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VdsError};

/// Dimensions of a 1-, 2- or 3-dimensional grid whose sides are powers of two.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GridDims {
    dims: Vec<usize>,
}

impl GridDims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() || dims.len() > 3 {
            return Err(VdsError::InvalidDims(format!(
                "rank must be 1, 2 or 3, got {}",
                dims.len()
            )));
        }
        for &d in &dims {
            if d < 2 || !d.is_power_of_two() {
                return Err(VdsError::InvalidDims(format!(
                    "every side must be a power of two >= 2, got {dims:?}"
                )));
            }
        }
        Ok(Self { dims })
    }

    /// Square (or cubic) grid with `side` cells along each of `rank` axes.
    pub fn cube(side: usize, rank: usize) -> Result<Self> {
        Self::new(vec![side; rank])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Total number of cells `n`.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_dim(&self) -> usize {
        *self.dims.iter().min().expect("rank >= 1")
    }

    pub fn max_dim(&self) -> usize {
        *self.dims.iter().max().expect("rank >= 1")
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for a in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        strides
    }

    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for a in (0..self.dims.len()).rev() {
            out[a] = index % self.dims[a];
            index /= self.dims[a];
        }
        out
    }

    pub fn ravel(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &d)| acc * d + c)
    }

    /// Centered frequency coordinates `k` of a stored index.
    pub fn frequency(&self, index: usize) -> Vec<i64> {
        self.unravel(index)
            .iter()
            .zip(&self.dims)
            .map(|(&j, &d)| j as i64 - (d / 2) as i64)
            .collect()
    }

    /// Euclidean norm `|k|` of the centered frequency of a stored index.
    pub fn frequency_norm(&self, index: usize) -> f64 {
        self.frequency(index)
            .iter()
            .map(|&k| (k * k) as f64)
            .sum::<f64>()
            .sqrt()
    }

    /// Stored index of the DC cell.
    pub fn dc_index(&self) -> usize {
        let centre: Vec<usize> = self.dims.iter().map(|d| d / 2).collect();
        self.ravel(&centre)
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(VdsError::ShapeMismatch {
                expected: self.len(),
                actual: len,
            });
        }
        Ok(())
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(VdsError::IndexOutOfRange {
                index,
                n: self.len(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for GridDims {
    type Error = VdsError;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        GridDims::new(dims)
    }
}

impl From<GridDims> for Vec<usize> {
    fn from(d: GridDims) -> Self {
        d.dims
    }
}

/// A dense row-major grid of values.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    pub dims: GridDims,
    pub data: Vec<T>,
}

pub type RealGrid = Grid<f64>;
pub type ComplexGrid = Grid<Complex64>;

impl<T: Clone> Grid<T> {
    pub fn new(dims: GridDims, data: Vec<T>) -> Result<Self> {
        dims.check_len(data.len())?;
        Ok(Self { dims, data })
    }

    pub fn filled(dims: GridDims, value: T) -> Self {
        let n = dims.len();
        Self {
            dims,
            data: vec![value; n],
        }
    }

    pub fn from_fn(dims: GridDims, f: impl FnMut(usize) -> T) -> Self {
        let data = (0..dims.len()).map(f).collect();
        Self { dims, data }
    }
}

impl<T> Grid<T> {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl Grid<f64> {
    pub fn to_complex(&self) -> ComplexGrid {
        Grid {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

impl Grid<Complex64> {
    pub fn re(&self) -> RealGrid {
        Grid {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| v.re).collect(),
        }
    }
}

fn half_shift<T: Clone>(dims: &GridDims, data: &[T]) -> Vec<T> {
    // For even sides the centered <-> FFT permutation is its own inverse.
    let shape = dims.dims();
    (0..dims.len())
        .map(|dst| {
            let coords = dims.unravel(dst);
            let src: Vec<usize> = coords
                .iter()
                .zip(shape)
                .map(|(&c, &d)| (c + d / 2) % d)
                .collect();
            data[dims.ravel(&src)].clone()
        })
        .collect()
}

/// Reorders a centered-layout grid into FFT layout.
pub fn shift_to_fft<T: Clone>(dims: &GridDims, centered: &[T]) -> Vec<T> {
    half_shift(dims, centered)
}

/// Reorders an FFT-layout grid into centered layout.
pub fn shift_to_centered<T: Clone>(dims: &GridDims, fft_layout: &[T]) -> Vec<T> {
    half_shift(dims, fft_layout)
}

/// Stored centered index -> FFT-layout index.
pub fn centered_to_fft_index(dims: &GridDims, index: usize) -> usize {
    let src: Vec<usize> = dims
        .unravel(index)
        .iter()
        .zip(dims.dims())
        .map(|(&c, &d)| (c + d / 2) % d)
        .collect();
    dims.ravel(&src)
}

const MAGIC: &[u8; 4] = b"VDSG";
const VERSION: u8 = 1;

/// Scalar types storable in a `VDSG` file.
pub trait VdsgScalar: Sized + Clone {
    const CODE: u8;
    fn write_le(&self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
    const WIDTH: usize;
}

impl VdsgScalar for f64 {
    const CODE: u8 = 0;
    const WIDTH: usize = 8;

    fn write_le(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}

impl VdsgScalar for Complex64 {
    const CODE: u8 = 1;
    const WIDTH: usize = 16;

    fn write_le(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.re.to_le_bytes());
        out.extend_from_slice(&self.im.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        Complex64::new(
            f64::from_le_bytes(bytes[..8].try_into().unwrap()),
            f64::from_le_bytes(bytes[8..16].try_into().unwrap()),
        )
    }
}

impl<T: VdsgScalar> Grid<T> {
    pub fn to_vdsg_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(7 + 4 * self.dims.rank() + T::WIDTH * self.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(T::CODE);
        out.push(self.dims.rank() as u8);
        for &d in self.dims.dims() {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in &self.data {
            v.write_le(&mut out);
        }
        out
    }

    pub fn from_vdsg_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| VdsError::Format(format!("VDSG: {msg}"));
        if bytes.len() < 7 || &bytes[..4] != MAGIC {
            return Err(bad("missing magic"));
        }
        if bytes[4] != VERSION {
            return Err(bad(&format!("unsupported version {}", bytes[4])));
        }
        if bytes[5] != T::CODE {
            return Err(bad(&format!(
                "scalar code {} does not match requested type {}",
                bytes[5],
                T::CODE
            )));
        }
        let rank = bytes[6] as usize;
        let header = 7 + 4 * rank;
        if bytes.len() < header {
            return Err(bad("truncated header"));
        }
        let dims: Vec<usize> = bytes[7..header]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect();
        let dims = GridDims::new(dims)?;
        let payload = &bytes[header..];
        if payload.len() != dims.len() * T::WIDTH {
            return Err(bad(&format!(
                "payload has {} bytes, expected {}",
                payload.len(),
                dims.len() * T::WIDTH
            )));
        }
        let data = payload.chunks_exact(T::WIDTH).map(T::read_le).collect();
        Ok(Self { dims, data })
    }

    pub fn write_vdsg<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_vdsg_bytes())?;
        Ok(())
    }

    pub fn read_vdsg<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_vdsg_bytes(&bytes)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_vdsg_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_vdsg_bytes(&std::fs::read(path)?)
    }
}

/// An index set on a grid, serialized as `{"dims": [...], "indices": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    pub dims: GridDims,
    pub indices: Vec<usize>,
}

impl IndexSet {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let set: IndexSet = serde_json::from_str(s)?;
        for &i in &set.indices {
            set.dims.check_index(i)?;
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims() {
        assert!(GridDims::new(vec![]).is_err());
        assert!(GridDims::new(vec![6, 8]).is_err());
        assert!(GridDims::new(vec![1, 8]).is_err());
        assert!(GridDims::new(vec![2, 2, 2, 2]).is_err());
        assert_eq!(GridDims::new(vec![4, 8]).unwrap().len(), 32);
    }

    #[test]
    fn ravel_unravel_and_dc() {
        let d = GridDims::new(vec![4, 8, 2]).unwrap();
        for i in 0..d.len() {
            assert_eq!(d.ravel(&d.unravel(i)), i);
        }
        assert_eq!(d.frequency(d.dc_index()), vec![0, 0, 0]);
        assert_eq!(d.frequency(0), vec![-2, -4, -1]);
    }

    #[test]
    fn shift_is_involution_and_moves_dc() {
        let d = GridDims::new(vec![4, 8]).unwrap();
        let data: Vec<usize> = (0..d.len()).collect();
        let f = shift_to_fft(&d, &data);
        assert_eq!(shift_to_centered(&d, &f), data);
        assert_eq!(f[0], d.dc_index());
        assert_eq!(centered_to_fft_index(&d, d.dc_index()), 0);
    }

    #[test]
    fn vdsg_header_layout() {
        let d = GridDims::new(vec![2, 4]).unwrap();
        let g = Grid::from_fn(d, |i| i as f64);
        let bytes = g.to_vdsg_bytes();
        assert_eq!(&bytes[..4], b"VDSG");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 0);
        assert_eq!(bytes[6], 2);
        assert_eq!(&bytes[7..11], &2u32.to_le_bytes());
        assert_eq!(&bytes[11..15], &4u32.to_le_bytes());
        assert_eq!(&bytes[15..23], &0.0f64.to_le_bytes());
        assert_eq!(bytes.len(), 15 + 8 * 8);
        assert_eq!(RealGrid::from_vdsg_bytes(&bytes).unwrap(), g);
    }

    #[test]
    fn vdsg_rejects_wrong_scalar_and_truncation() {
        let d = GridDims::new(vec![2, 2]).unwrap();
        let g = Grid::from_fn(d, |i| Complex64::new(i as f64, -1.0));
        let bytes = g.to_vdsg_bytes();
        assert_eq!(bytes[5], 1);
        assert!(RealGrid::from_vdsg_bytes(&bytes).is_err());
        assert!(ComplexGrid::from_vdsg_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert_eq!(ComplexGrid::from_vdsg_bytes(&bytes).unwrap(), g);
    }

    #[test]
    fn index_set_json_shape() {
        let set = IndexSet {
            dims: GridDims::new(vec![4, 4]).unwrap(),
            indices: vec![3, 5],
        };
        let json = set.to_json().unwrap();
        assert_eq!(json, r#"{"dims":[4,4],"indices":[3,5]}"#);
        assert_eq!(IndexSet::from_json(&json).unwrap(), set);
        assert!(IndexSet::from_json(r#"{"dims":[4,4],"indices":[16]}"#).is_err());
    }
}
