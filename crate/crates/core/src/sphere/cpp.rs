//! Craster parabolic projection (CPP).
//!
//! Normalized coordinates: `x_n = lon (2 cos(2 lat / 3) - 1) / 2π` and
//! `y_n = sin(lat / 3)`, both spanning `[-0.5, 0.5]`. Grid coordinates put
//! the center of cell `(i, j)` at `(i, j)`, so the image edges sit at `-0.5`
//! and `W - 0.5` / `H - 0.5`.

use std::f64::consts::{PI, TAU};

use super::{GeometryError, LatLon, PixelCoord};

#[derive(Debug, Clone, PartialEq)]
pub struct CppGrid {
    pub width: usize,
    pub height: usize,
    valid_mask: Vec<bool>,
}

impl CppGrid {
    pub fn new(width: usize, height: usize) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::EmptyGeometry { width, height });
        }
        let mut grid = Self {
            width,
            height,
            valid_mask: Vec::new(),
        };
        let mut mask = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                let p = PixelCoord {
                    x: i as f64,
                    y: j as f64,
                };
                mask.push(cpp_inverse(p, &grid).is_some());
            }
        }
        grid.valid_mask = mask;
        Ok(grid)
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid_mask[j * self.width + i]
    }

    pub fn valid_count(&self) -> usize {
        self.valid_mask.iter().filter(|&&v| v).count()
    }

    pub fn valid_fraction(&self) -> f64 {
        self.valid_count() as f64 / self.valid_mask.len() as f64
    }
}

pub fn cpp_forward(dir: LatLon, grid: &CppGrid) -> PixelCoord {
    let w = grid.width as f64;
    let h = grid.height as f64;
    let x_norm = dir.lon * (2.0 * (2.0 * dir.lat / 3.0).cos() - 1.0) / TAU;
    let y_norm = (dir.lat / 3.0).sin();
    PixelCoord {
        x: (x_norm + 0.5) * w - 0.5,
        y: (0.5 - y_norm) * h - 0.5,
    }
}

/// Inverse of [`cpp_forward`]; `None` for positions outside the parabolic
/// footprint.
pub fn cpp_inverse(p: PixelCoord, grid: &CppGrid) -> Option<LatLon> {
    let w = grid.width as f64;
    let h = grid.height as f64;
    let y_norm = 0.5 - (p.y + 0.5) / h;
    let x_norm = (p.x + 0.5) / w - 0.5;
    if !(-0.5..=0.5).contains(&y_norm) {
        return None;
    }
    let lat = 3.0 * y_norm.asin();
    let scale = 2.0 * (2.0 * lat / 3.0).cos() - 1.0;
    let lon = if x_norm == 0.0 {
        0.0
    } else {
        TAU * x_norm / scale
    };
    if !lon.is_finite() || lon.abs() > PI {
        return None;
    }
    Some(LatLon { lat, lon })
}
