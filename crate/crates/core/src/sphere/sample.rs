//! Sampling kernels over a luma plane and bilinear frame resizing.
//!
//! Kernel coordinates put the center of sample `(i, j)` at `(i, j)`.
//! Horizontal lookups wrap across the ERP seam; vertical lookups clamp.

use super::{ErpGeometry, PixelCoord};
use crate::media::{FrameSource, MediaError, Plane, YuvFrame};

/// Interpolation kernel used when sampling a frame at a fractional position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Nearest,
    Bilinear,
}

#[inline]
fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

pub fn sample_bilinear(plane: &Plane, c: PixelCoord) -> f64 {
    let w = plane.width;
    let h = plane.height;
    let x0 = c.x.floor();
    let fx = c.x - x0;
    let yc = c.y.clamp(0.0, (h - 1) as f64);
    let y0 = yc.floor();
    let fy = yc - y0;
    let xa = wrap(x0 as i64, w);
    let xb = wrap(x0 as i64 + 1, w);
    let ya = y0 as usize;
    let yb = (ya + 1).min(h - 1);
    let p = |i, j| f64::from(plane.get(i, j));
    let top = p(xa, ya) * (1.0 - fx) + p(xb, ya) * fx;
    let bottom = p(xa, yb) * (1.0 - fx) + p(xb, yb) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Value of the nearest sample; exact ties go to the smaller index.
pub fn sample_nearest(plane: &Plane, c: PixelCoord) -> f64 {
    let i = wrap((c.x - 0.5).ceil() as i64, plane.width);
    let j = ((c.y - 0.5).ceil() as i64).clamp(0, plane.height as i64 - 1) as usize;
    f64::from(plane.get(i, j))
}

#[inline]
pub fn sample(plane: &Plane, c: PixelCoord, kernel: Kernel) -> f64 {
    match kernel {
        Kernel::Nearest => sample_nearest(plane, c),
        Kernel::Bilinear => sample_bilinear(plane, c),
    }
}

fn resize_plane(src: &Plane, width: usize, height: usize, peak: f64) -> Plane {
    if src.width == width && src.height == height {
        return src.clone();
    }
    let sx = src.width as f64 / width as f64;
    let sy = src.height as f64 / height as f64;
    let max_x = (src.width - 1) as f64;
    let max_y = (src.height - 1) as f64;
    Plane::from_fn(width, height, |i, j| {
        let x = ((i as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
        let y = ((j as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(src.width - 1);
        let y1 = (y0 + 1).min(src.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let p = |a, b| f64::from(src.get(a, b));
        let v = (p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx) * (1.0 - fy)
            + (p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx) * fy;
        v.round().clamp(0.0, peak) as u16
    })
}

/// Resamples every plane with center-aligned bilinear interpolation; chroma
/// planes go to half the target size.
pub fn resize_bilinear(frame: &YuvFrame, target: ErpGeometry) -> Result<YuvFrame, MediaError> {
    crate::media::check_geometry(target.width, target.height)?;
    let peak = frame.peak();
    let (cw, ch) = (target.width / 2, target.height / 2);
    YuvFrame::new(
        frame.bit_depth,
        resize_plane(&frame.y, target.width, target.height, peak),
        resize_plane(&frame.u, cw, ch, peak),
        resize_plane(&frame.v, cw, ch, peak),
        frame.frame_index,
    )
}

/// Wraps a frame source and resizes every frame it yields to `target`.
pub struct ResizedSource<'a> {
    inner: &'a mut dyn FrameSource,
    target: ErpGeometry,
}

impl<'a> ResizedSource<'a> {
    pub fn new(inner: &'a mut dyn FrameSource, target: ErpGeometry) -> Self {
        Self { inner, target }
    }
}

impl FrameSource for ResizedSource<'_> {
    fn width(&self) -> usize {
        self.target.width
    }
    fn height(&self) -> usize {
        self.target.height
    }
    fn bit_depth(&self) -> u8 {
        self.inner.bit_depth()
    }
    fn frame_count(&self) -> usize {
        self.inner.frame_count()
    }
    fn read_frame(&mut self, index: usize) -> Result<YuvFrame, MediaError> {
        resize_bilinear(&self.inner.read_frame(index)?, self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> Plane {
        Plane::new(4, 2, vec![10, 20, 30, 40, 50, 60, 70, 80]).unwrap()
    }

    #[test]
    fn bilinear_centers_and_midpoints() {
        let p = ramp();
        assert_eq!(sample_bilinear(&p, PixelCoord { x: 2.0, y: 1.0 }), 70.0);
        assert_eq!(sample_bilinear(&p, PixelCoord { x: 0.5, y: 0.0 }), 15.0);
    }

    #[test]
    fn bilinear_wraps_seam() {
        let p = ramp();
        // 0.25 past the last column center towards the (wrapped) first column.
        let v = sample_bilinear(
            &p,
            PixelCoord {
                x: 3.5 + 0.25,
                y: 0.0,
            },
        );
        let hand = 40.0 * 0.25 + 10.0 * 0.75;
        assert!((v - hand).abs() < 1e-12);
        let v = sample_bilinear(&p, PixelCoord { x: -0.5, y: 1.0 });
        assert!((v - 65.0).abs() < 1e-12);
    }

    #[test]
    fn bilinear_clamps_vertically() {
        let p = ramp();
        assert_eq!(sample_bilinear(&p, PixelCoord { x: 1.0, y: -0.5 }), 20.0);
        assert_eq!(sample_bilinear(&p, PixelCoord { x: 1.0, y: 1.5 }), 60.0);
    }

    #[test]
    fn nearest_rounding_and_ties() {
        let p = ramp();
        assert_eq!(sample_nearest(&p, PixelCoord { x: 1.4, y: 0.2 }), 20.0);
        assert_eq!(sample_nearest(&p, PixelCoord { x: 1.5, y: 0.0 }), 20.0);
        assert_eq!(sample_nearest(&p, PixelCoord { x: 1.6, y: 0.0 }), 30.0);
        assert_eq!(sample_nearest(&p, PixelCoord { x: 2.0, y: -0.4 }), 30.0);
        assert_eq!(sample_nearest(&p, PixelCoord { x: 3.6, y: 0.0 }), 10.0);
    }

    #[test]
    fn resize_identity_and_constant() {
        let f = YuvFrame::from_luma(Plane::from_fn(8, 4, |i, j| (i * 30 + j) as u16), 8).unwrap();
        let same = resize_bilinear(&f, ErpGeometry::new(8, 4).unwrap()).unwrap();
        assert_eq!(same, f);

        let c = YuvFrame::from_luma(Plane::filled(8, 4, 77), 8).unwrap();
        let big = resize_bilinear(&c, ErpGeometry::new(22, 10).unwrap()).unwrap();
        assert!(big.y.data.iter().all(|&v| v == 77));
        assert_eq!((big.u.width, big.u.height), (11, 5));
    }

    #[test]
    fn upscale_two_pixel_gradient() {
        // Rows of [0, 100] doubled to four columns: centers map to source
        // x = -0.25, 0.25, 0.75, 1.25 which clamp and blend to 0, 25, 75, 100.
        let y = Plane::from_fn(2, 2, |i, _| (i * 100) as u16);
        let f = YuvFrame::new(8, y, Plane::filled(1, 1, 128), Plane::filled(1, 1, 128), 0).unwrap();
        let up = resize_bilinear(&f, ErpGeometry::new(4, 2).unwrap()).unwrap();
        assert_eq!(up.y.row(0), &[0, 25, 75, 100]);
        assert_eq!(up.y.row(1), &[0, 25, 75, 100]);
    }
}
