//! PSNR and its sphere-aware variants, computed on luma.

use super::score::{ordered_row_sum, psnr_from_mse, score_sequence};
use super::{MetricError, MetricScore};
use crate::media::{Plane, SequencePair};
use crate::sphere::{
    cpp_inverse, sample, sphere_to_erp_pixel, CppGrid, ErpGeometry, Kernel, PixelCoord,
    SpherePointSet, WeightMap,
};

pub fn psnr_frame(reference: &Plane, distorted: &Plane, peak: f64) -> f64 {
    let w = reference.width;
    let sse = ordered_row_sum(reference.height, |j| {
        reference
            .row(j)
            .iter()
            .zip(distorted.row(j))
            .map(|(&a, &b)| {
                let e = f64::from(a) - f64::from(b);
                e * e
            })
            .sum()
    });
    psnr_from_mse(sse / (w * reference.height) as f64, peak)
}

pub fn ws_psnr_frame(
    reference: &Plane,
    distorted: &Plane,
    weights: &WeightMap,
    peak: f64,
) -> Result<f64, MetricError> {
    if weights.width != reference.width || weights.height() != reference.height {
        return Err(MetricError::WeightGeometry {
            weights: (weights.width, weights.height()),
            frame: (reference.width, reference.height),
        });
    }
    let weighted = ordered_row_sum(reference.height, |j| {
        let w = weights.weight(0, j);
        let row: f64 = reference
            .row(j)
            .iter()
            .zip(distorted.row(j))
            .map(|(&a, &b)| {
                let e = f64::from(a) - f64::from(b);
                e * e
            })
            .sum();
        w * row
    });
    Ok(psnr_from_mse(weighted / weights.total(), peak))
}

/// Sample positions of a sphere point set in one ERP frame geometry, in
/// kernel coordinates.
#[derive(Debug, Clone)]
pub struct SphereSampling {
    geometry: ErpGeometry,
    coords: Vec<PixelCoord>,
}

impl SphereSampling {
    pub fn new(points: &SpherePointSet, geometry: ErpGeometry) -> Self {
        let coords = points
            .points()
            .iter()
            .map(|&p| {
                let c = sphere_to_erp_pixel(p, geometry);
                PixelCoord {
                    x: c.x - 0.5,
                    y: c.y - 0.5,
                }
            })
            .collect();
        Self { geometry, coords }
    }

    pub fn geometry(&self) -> ErpGeometry {
        self.geometry
    }
}

const CHUNK: usize = 4096;

fn squared_diff_at(coords: &[PixelCoord], r: &Plane, d: &Plane, kernel: Kernel) -> f64 {
    ordered_row_sum(coords.len().div_ceil(CHUNK), |c| {
        coords[c * CHUNK..((c + 1) * CHUNK).min(coords.len())]
            .iter()
            .map(|&p| {
                let e = sample(r, p, kernel) - sample(d, p, kernel);
                e * e
            })
            .sum()
    })
}

pub fn spsnr_frame(
    reference: &Plane,
    distorted: &Plane,
    sampling: &SphereSampling,
    kernel: Kernel,
    peak: f64,
) -> f64 {
    let sse = squared_diff_at(&sampling.coords, reference, distorted, kernel);
    psnr_from_mse(sse / sampling.coords.len() as f64, peak)
}

/// ERP sample positions of every valid cell of a CPP grid.
#[derive(Debug, Clone)]
pub struct CppSampling {
    geometry: ErpGeometry,
    coords: Vec<PixelCoord>,
}

impl CppSampling {
    pub fn new(grid: &CppGrid, geometry: ErpGeometry) -> Self {
        let mut coords = Vec::with_capacity(grid.valid_count());
        for j in 0..grid.height {
            for i in 0..grid.width {
                if !grid.is_valid(i, j) {
                    continue;
                }
                let p = PixelCoord {
                    x: i as f64,
                    y: j as f64,
                };
                if let Some(dir) = cpp_inverse(p, grid) {
                    let c = sphere_to_erp_pixel(dir, geometry);
                    coords.push(PixelCoord {
                        x: c.x - 0.5,
                        y: c.y - 0.5,
                    });
                }
            }
        }
        Self { geometry, coords }
    }

    pub fn geometry(&self) -> ErpGeometry {
        self.geometry
    }
}

pub fn cpp_psnr_frame(
    reference: &Plane,
    distorted: &Plane,
    sampling: &CppSampling,
    kernel: Kernel,
    peak: f64,
) -> f64 {
    let sse = squared_diff_at(&sampling.coords, reference, distorted, kernel);
    psnr_from_mse(sse / sampling.coords.len() as f64, peak)
}

pub fn psnr(pair: &mut SequencePair<'_>) -> Result<MetricScore, MetricError> {
    score_sequence(pair, "psnr", |r, d| Ok(psnr_frame(&r.y, &d.y, r.peak())))
}

pub fn ws_psnr(
    pair: &mut SequencePair<'_>,
    weights: &WeightMap,
) -> Result<MetricScore, MetricError> {
    score_sequence(pair, "ws_psnr", |r, d| {
        ws_psnr_frame(&r.y, &d.y, weights, r.peak())
    })
}

/// S-PSNR over a sphere point set; `Kernel::Nearest` gives S-PSNR-NN and
/// `Kernel::Bilinear` gives S-PSNR-I.
pub fn spsnr(
    pair: &mut SequencePair<'_>,
    points: &SpherePointSet,
    kernel: Kernel,
) -> Result<MetricScore, MetricError> {
    let mut sampling: Option<SphereSampling> = None;
    let name = match kernel {
        Kernel::Nearest => "s_psnr_nn",
        Kernel::Bilinear => "s_psnr_i",
    };
    score_sequence(pair, name, |r, d| {
        let geom = ErpGeometry::new(r.width, r.height)?;
        let s = match &sampling {
            Some(s) if s.geometry() == geom => s,
            _ => sampling.insert(SphereSampling::new(points, geom)),
        };
        Ok(spsnr_frame(&r.y, &d.y, s, kernel, r.peak()))
    })
}

pub fn cpp_psnr(
    pair: &mut SequencePair<'_>,
    grid: &CppGrid,
    kernel: Kernel,
) -> Result<MetricScore, MetricError> {
    let mut sampling: Option<CppSampling> = None;
    score_sequence(pair, "cpp_psnr", |r, d| {
        let geom = ErpGeometry::new(r.width, r.height)?;
        let s = match &sampling {
            Some(s) if s.geometry() == geom => s,
            _ => sampling.insert(CppSampling::new(grid, geom)),
        };
        Ok(cpp_psnr_frame(&r.y, &d.y, s, kernel, r.peak()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{MemorySequence, YuvFrame};
    use crate::sphere::{generate_sphere_points, make_ws_weight_map, parse_sphere_points};

    fn seq(planes: Vec<Plane>) -> MemorySequence {
        MemorySequence::new(
            planes
                .into_iter()
                .map(|p| YuvFrame::from_luma(p, 8).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_offsets() {
        let a = Plane::filled(16, 8, 128);
        let b = Plane::filled(16, 8, 127);
        assert!((psnr_frame(&a, &b, 255.0) - 48.1308).abs() < 1e-4);
        assert_eq!(
            psnr_frame(&Plane::filled(4, 2, 0), &Plane::filled(4, 2, 255), 255.0),
            0.0
        );

        let g = ErpGeometry::new(16, 8).unwrap();
        let expected = psnr_from_mse(1.0, 255.0);
        let pts = generate_sphere_points(500).unwrap();
        for kernel in [Kernel::Nearest, Kernel::Bilinear] {
            let s = SphereSampling::new(&pts, g);
            assert!((spsnr_frame(&a, &b, &s, kernel, 255.0) - expected).abs() < 1e-9);
            let c = CppSampling::new(&CppGrid::new(16, 8).unwrap(), g);
            assert!((cpp_psnr_frame(&a, &b, &c, kernel, 255.0) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn ws_weighting_favours_polar_error() {
        let base = Plane::filled(16, 8, 100);
        let mut top = base.clone();
        let mut equator = base.clone();
        for i in 0..16 {
            top.data[i] = 110;
            equator.data[3 * 16 + i] = 110;
        }
        let w = make_ws_weight_map(ErpGeometry::new(16, 8).unwrap());
        let t = ws_psnr_frame(&base, &top, &w, 255.0).unwrap();
        let e = ws_psnr_frame(&base, &equator, &w, 255.0).unwrap();
        assert!(t > e, "{t} vs {e}");
        // Unweighted PSNR cannot tell the two apart.
        assert_eq!(
            psnr_frame(&base, &top, 255.0),
            psnr_frame(&base, &equator, 255.0)
        );
    }

    #[test]
    fn single_front_point_reads_frame_center() {
        let g = ErpGeometry::new(16, 8).unwrap();
        let pts = parse_sphere_points("0 0\n").unwrap();
        let a = Plane::from_fn(16, 8, |i, j| (i * 10 + j) as u16);
        let mut b = a.clone();
        // (0, 0) lands on the corner shared by pixels (7..=8, 3..=4); ties go to (7, 3).
        b.data[3 * 16 + 7] += 6;
        let s = SphereSampling::new(&pts, g);
        let nn = spsnr_frame(&a, &b, &s, Kernel::Nearest, 255.0);
        assert!((nn - psnr_from_mse(36.0, 255.0)).abs() < 1e-12);
    }

    #[test]
    fn identical_sequences_cap() {
        let p = Plane::from_fn(32, 16, |i, j| ((i * 7 + j * 3) % 256) as u16);
        let mut r = seq(vec![p.clone(), p.clone()]);
        let mut d = seq(vec![p.clone(), p]);
        let mut pair = SequencePair::new(&mut r, &mut d).unwrap();
        let s = psnr(&mut pair).unwrap();
        assert_eq!(s.pooled, 100.0);
        assert_eq!(s.capped_frames, 2);
        let pts = generate_sphere_points(64).unwrap();
        assert_eq!(
            spsnr(&mut pair, &pts, Kernel::Bilinear).unwrap().pooled,
            100.0
        );
        let grid = CppGrid::new(32, 16).unwrap();
        assert_eq!(
            cpp_psnr(&mut pair, &grid, Kernel::Bilinear).unwrap().pooled,
            100.0
        );
    }

    #[test]
    fn geometry_mismatch_is_an_error() {
        let mut r = seq(vec![Plane::filled(8, 4, 1)]);
        let mut d = seq(vec![Plane::filled(4, 2, 1)]);
        let mut pair = SequencePair::new(&mut r, &mut d).unwrap();
        assert!(matches!(
            psnr(&mut pair),
            Err(MetricError::GeometryMismatch { .. })
        ));
    }
}
