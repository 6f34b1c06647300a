use crate::error::{Result, VdsError};
use crate::grid::{GridDims, RealGrid};

use super::config::PhantomSource;

/// (intensity, semi-axis a, semi-axis b, centre x, centre y, angle in degrees)
/// on `[-1, 1]²`, y pointing up. The usual modified Shepp-Logan table.
const ELLIPSES: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

const SUPERSAMPLE: usize = 4;

fn ellipse_value(x: f64, y: f64) -> f64 {
    let mut v = 0.0;
    for &[a0, a, b, cx, cy, deg] in &ELLIPSES {
        let (s, c) = deg.to_radians().sin_cos();
        let (dx, dy) = (x - cx, y - cy);
        let u = dx * c + dy * s;
        let w = -dx * s + dy * c;
        if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
            v += a0;
        }
    }
    // overlapping intensities cancel to round-off below zero
    v.max(0.0)
}

/// Piecewise-constant ellipse phantom, each pixel averaged over a 4×4
/// subgrid. Row 0 is the top of the image.
pub fn shepp_logan(dims: &GridDims) -> Result<RealGrid> {
    if dims.rank() != 2 {
        return Err(VdsError::InvalidArgument(format!(
            "the builtin phantom is 2D, got rank {}",
            dims.rank()
        )));
    }
    let (rows, cols) = (dims.dims()[0], dims.dims()[1]);
    let sub = SUPERSAMPLE as f64;
    Ok(RealGrid::from_fn(dims.clone(), |idx| {
        let (r, c) = (idx / cols, idx % cols);
        let mut acc = 0.0;
        for si in 0..SUPERSAMPLE {
            for sj in 0..SUPERSAMPLE {
                let x = -1.0 + 2.0 * (c as f64 + (sj as f64 + 0.5) / sub) / cols as f64;
                let y = 1.0 - 2.0 * (r as f64 + (si as f64 + 0.5) / sub) / rows as f64;
                acc += ellipse_value(x, y);
            }
        }
        acc / (sub * sub)
    }))
}

pub fn load_phantom(source: &PhantomSource, dims: &GridDims) -> Result<RealGrid> {
    let image = match source {
        PhantomSource::Builtin => shepp_logan(dims)?,
        PhantomSource::File { path } => RealGrid::load(path)?,
    };
    if &image.dims != dims {
        return Err(VdsError::Config(format!(
            "phantom is {:?}, experiment grid is {:?}",
            image.dims.dims(),
            dims.dims()
        )));
    }
    if image.data.iter().all(|v| *v == 0.0) {
        return Err(VdsError::Config("phantom image is identically zero".into()));
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phantom_values() {
        let dims = GridDims::new(vec![64, 64]).unwrap();
        let img = shepp_logan(&dims).unwrap();
        // corners are empty, the centre sits in the 0.2 background tissue
        assert_eq!(img.data[0], 0.0);
        let centre = img.data[32 * 64 + 32];
        assert!((centre - 0.2).abs() < 1e-12, "{centre}");
        let max = img.data.iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        assert!(img.data.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
        // left-right mirror of the two large dark ellipses
        assert!(img.data[32 * 64 + 24] < 0.1 && img.data[32 * 64 + 39] < 0.1);
        assert!(shepp_logan(&GridDims::new(vec![8, 8, 8]).unwrap()).is_err());
    }
}
