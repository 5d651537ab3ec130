use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::GeometryError;

/// A direction on the unit sphere, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    pub fn to_unit_vector(self) -> [f64; 3] {
        let (sl, cl) = self.lat.sin_cos();
        let (so, co) = self.lon.sin_cos();
        [cl * co, cl * so, sl]
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        Self {
            lat: v[2].clamp(-1.0, 1.0).asin(),
            lon: v[1].atan2(v[0]),
        }
    }
}

/// A fractional position in a sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCoord {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErpGeometry {
    pub width: usize,
    pub height: usize,
}

impl ErpGeometry {
    pub fn new(width: usize, height: usize) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::EmptyGeometry { width, height });
        }
        if width != 2 * height {
            log::warn!("ERP geometry {width}x{height} is not 2:1");
        }
        Ok(Self { width, height })
    }

    pub fn is_canonical(&self) -> bool {
        self.width == 2 * self.height
    }
}

/// Maps the center of pixel `(i, j)` to its sphere direction.
pub fn erp_pixel_to_sphere(i: usize, j: usize, geom: ErpGeometry) -> Result<LatLon, GeometryError> {
    if i >= geom.width || j >= geom.height {
        return Err(GeometryError::PixelOutOfRange {
            i,
            j,
            width: geom.width,
            height: geom.height,
        });
    }
    let w = geom.width as f64;
    let h = geom.height as f64;
    Ok(LatLon {
        lat: FRAC_PI_2 - PI * (j as f64 + 0.5) / h,
        lon: TAU * (i as f64 + 0.5) / w - PI,
    })
}

/// Continuous inverse of [`sphere_to_erp_pixel`]: coordinates measured from
/// the top-left image corner back to a direction.
pub fn erp_coord_to_sphere(c: PixelCoord, geom: ErpGeometry) -> LatLon {
    let w = geom.width as f64;
    let h = geom.height as f64;
    LatLon {
        lat: FRAC_PI_2 - PI * c.y / h,
        lon: TAU * c.x / w - PI,
    }
}

/// Maps a direction to ERP image coordinates measured from the top-left
/// image corner, so the center of pixel `(i, j)` is at `(i + 0.5, j + 0.5)`.
///
/// Longitude wraps into `[0, W)`; latitude clamps to the poles.
pub fn sphere_to_erp_pixel(dir: LatLon, geom: ErpGeometry) -> PixelCoord {
    let w = geom.width as f64;
    let h = geom.height as f64;
    let lat = dir.lat.clamp(-FRAC_PI_2, FRAC_PI_2);
    let mut x = (dir.lon + PI) / TAU * w;
    x = x.rem_euclid(w);
    // rem_euclid can return w itself for tiny negative inputs.
    if x >= w {
        x -= w;
    }
    PixelCoord {
        x,
        y: (FRAC_PI_2 - lat) / PI * h,
    }
}

/// Per-row solid-angle weights of an ERP frame.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    pub width: usize,
    row_weights: Vec<f64>,
    total: f64,
}

impl WeightMap {
    #[inline]
    pub fn weight(&self, _i: usize, j: usize) -> f64 {
        self.row_weights[j]
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }

    pub fn height(&self) -> usize {
        self.row_weights.len()
    }

    /// Sum of the weights over every pixel.
    pub fn total(&self) -> f64 {
        self.total
    }
}

pub fn make_ws_weight_map(geom: ErpGeometry) -> WeightMap {
    let h = geom.height as f64;
    let row_weights: Vec<f64> = (0..geom.height)
        .map(|j| (((j as f64 + 0.5) - h / 2.0) * PI / h).cos())
        .collect();
    let total = row_weights.iter().sum::<f64>() * geom.width as f64;
    WeightMap {
        width: geom.width,
        row_weights,
        total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn corner_pixels_of_small_frame() {
        let g = ErpGeometry::new(4, 2).unwrap();
        let a = erp_pixel_to_sphere(0, 0, g).unwrap();
        assert!((a.lat - FRAC_PI_4).abs() < 1e-15);
        assert!((a.lon + 3.0 * FRAC_PI_4).abs() < 1e-15);
        let b = erp_pixel_to_sphere(3, 1, g).unwrap();
        assert!((b.lat + FRAC_PI_4).abs() < 1e-15);
        assert!((b.lon - 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert!(erp_pixel_to_sphere(4, 0, g).is_err());
    }

    #[test]
    fn center_pixel_is_near_origin() {
        let g = ErpGeometry::new(64, 32).unwrap();
        let c = erp_pixel_to_sphere(32, 16, g).unwrap();
        assert!(c.lat.abs() <= PI / 32.0 / 2.0 + 1e-15);
        assert!(c.lon.abs() <= TAU / 64.0 / 2.0 + 1e-15);
    }

    #[test]
    fn inverse_on_pixel_centers() {
        let g = ErpGeometry::new(16, 8).unwrap();
        for j in 0..8 {
            for i in 0..16 {
                let p = sphere_to_erp_pixel(erp_pixel_to_sphere(i, j, g).unwrap(), g);
                assert!((p.x - (i as f64 + 0.5)).abs() < 1e-9);
                assert!((p.y - (j as f64 + 0.5)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn longitude_wraps() {
        let g = ErpGeometry::new(3840, 1920).unwrap();
        let east = sphere_to_erp_pixel(LatLon::new(0.3, PI), g);
        let west = sphere_to_erp_pixel(LatLon::new(0.3, -PI), g);
        assert_eq!(east.x.floor(), west.x.floor());
        let origin = sphere_to_erp_pixel(LatLon::new(0.0, 0.0), g);
        assert_eq!((origin.x, origin.y), (1920.0, 960.0));
    }

    #[test]
    fn two_row_weights() {
        let m = make_ws_weight_map(ErpGeometry::new(4, 2).unwrap());
        for w in m.row_weights() {
            assert!((w - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!((m.total() - 8.0 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn uhd_equator_rows_share_maximum() {
        let m = make_ws_weight_map(ErpGeometry::new(3840, 1920).unwrap());
        let rows = m.row_weights();
        let expected = (PI / 3840.0).cos();
        assert!((rows[959] - expected).abs() < 1e-15);
        assert!((rows[960] - expected).abs() < 1e-15);
        let max = rows.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, rows[959].max(rows[960]));
    }

    #[test]
    fn column_integral_approximates_two() {
        for h in [64usize, 128, 301] {
            let m = make_ws_weight_map(ErpGeometry::new(2 * h, h).unwrap());
            let integral: f64 = m.row_weights().iter().sum::<f64>() * PI / h as f64;
            assert!((integral - 2.0).abs() / 2.0 < 0.01, "h={h}: {integral}");
        }
    }
}
