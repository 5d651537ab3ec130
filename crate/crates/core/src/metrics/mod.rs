//! Full-reference video quality metrics and SI/TI.
//!
//! Every metric scores the luma plane per frame and pools by the arithmetic
//! mean over frames. PSNR-family scores of identical frames are capped at
//! [`PSNR_CAP_DB`].

mod psnr;
mod score;
mod siti;
mod ssim;

use std::fmt;
use std::str::FromStr;

pub use psnr::{
    cpp_psnr, cpp_psnr_frame, psnr, psnr_frame, spsnr, spsnr_frame, ws_psnr, ws_psnr_frame,
    CppSampling, SphereSampling,
};
pub use score::{psnr_from_mse, MetricScore, PSNR_CAP_DB};
pub use siti::{si_ti, sobel_magnitude, spatial_information, temporal_information, SiTiResult};
pub use ssim::{
    gaussian_taps, ms_ssim, ms_ssim_frame, ssim, ssim_frame, ssim_terms, Image, SsimTerms,
    MS_SSIM_EXPONENTS, MS_SSIM_MIN_SIZE, WINDOW as SSIM_WINDOW,
};

use crate::media::{MediaError, SequencePair};
use crate::sphere::{
    generate_sphere_points, make_ws_weight_map, CppGrid, ErpGeometry, GeometryError, Kernel,
    SpherePointSet, WeightMap, DEFAULT_SPHERE_POINTS,
};

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("reference is {}x{} but distorted is {}x{}; resize first", reference.0, reference.1, distorted.0, distorted.1)]
    GeometryMismatch {
        reference: (usize, usize),
        distorted: (usize, usize),
    },
    #[error("reference is {reference}-bit but distorted is {distorted}-bit")]
    BitDepthMismatch { reference: u8, distorted: u8 },
    #[error("weight map is {}x{} but frames are {}x{}", weights.0, weights.1, frame.0, frame.1)]
    WeightGeometry {
        weights: (usize, usize),
        frame: (usize, usize),
    },
    #[error("frame {width}x{height} is smaller than the required {min}x{min}")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("sequence has no frames")]
    EmptySequence,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The natively computed video metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VideoMetric {
    Psnr,
    WsPsnr,
    SPsnrNn,
    SPsnrI,
    CppPsnr,
    Ssim,
    MsSsim,
}

impl VideoMetric {
    pub const ALL: [VideoMetric; 7] = [
        VideoMetric::Psnr,
        VideoMetric::WsPsnr,
        VideoMetric::SPsnrNn,
        VideoMetric::SPsnrI,
        VideoMetric::CppPsnr,
        VideoMetric::Ssim,
        VideoMetric::MsSsim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VideoMetric::Psnr => "psnr",
            VideoMetric::WsPsnr => "ws_psnr",
            VideoMetric::SPsnrNn => "s_psnr_nn",
            VideoMetric::SPsnrI => "s_psnr_i",
            VideoMetric::CppPsnr => "cpp_psnr",
            VideoMetric::Ssim => "ssim",
            VideoMetric::MsSsim => "ms_ssim",
        }
    }
}

impl fmt::Display for VideoMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VideoMetric {
    type Err = MetricError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        VideoMetric::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| MetricError::UnknownMetric(s.to_string()))
    }
}

/// Geometry-dependent state shared by the spherical metrics, built lazily
/// for the first frame geometry seen.
#[derive(Debug, Default)]
pub struct MetricContext {
    points: Option<SpherePointSet>,
    weights: Option<WeightMap>,
    sphere: Option<SphereSampling>,
    cpp: Option<CppSampling>,
}

impl MetricContext {
    /// Uses the given directions for S-PSNR instead of the default lattice.
    pub fn with_points(points: SpherePointSet) -> Self {
        Self {
            points: Some(points),
            ..Self::default()
        }
    }

    fn prepare(&mut self, metric: VideoMetric, geom: ErpGeometry) -> Result<(), MetricError> {
        match metric {
            VideoMetric::WsPsnr => {
                if self
                    .weights
                    .as_ref()
                    .is_none_or(|w| w.width != geom.width || w.height() != geom.height)
                {
                    self.weights = Some(make_ws_weight_map(geom));
                }
            }
            VideoMetric::SPsnrNn | VideoMetric::SPsnrI => {
                if self.sphere.as_ref().is_none_or(|s| s.geometry() != geom) {
                    if self.points.is_none() {
                        self.points = Some(generate_sphere_points(DEFAULT_SPHERE_POINTS)?);
                    }
                    let points = self.points.as_ref().expect("points initialized above");
                    self.sphere = Some(SphereSampling::new(points, geom));
                }
            }
            VideoMetric::CppPsnr if self.cpp.as_ref().is_none_or(|c| c.geometry() != geom) => {
                let grid = CppGrid::new(geom.width, geom.height)?;
                self.cpp = Some(CppSampling::new(&grid, geom));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Scores a sequence pair with several metrics, reading each frame once.
/// Results come back in the order of `metrics`.
pub fn compute_metrics(
    pair: &mut SequencePair<'_>,
    metrics: &[VideoMetric],
    ctx: &mut MetricContext,
) -> Result<Vec<MetricScore>, MetricError> {
    if pair.frame_count() == 0 {
        return Err(MetricError::EmptySequence);
    }
    let mut raw: Vec<Vec<f64>> = vec![Vec::with_capacity(pair.frame_count()); metrics.len()];
    for idx in 0..pair.frame_count() {
        let (r, d) = pair.read(idx)?;
        score::check_pair(&r, &d)?;
        let geom = ErpGeometry::new(r.width, r.height)?;
        let peak = r.peak();
        for (slot, &metric) in raw.iter_mut().zip(metrics) {
            ctx.prepare(metric, geom)?;
            let value = match metric {
                VideoMetric::Psnr => psnr_frame(&r.y, &d.y, peak),
                VideoMetric::WsPsnr => {
                    ws_psnr_frame(&r.y, &d.y, ctx.weights.as_ref().expect("prepared"), peak)?
                }
                VideoMetric::SPsnrNn => spsnr_frame(
                    &r.y,
                    &d.y,
                    ctx.sphere.as_ref().expect("prepared"),
                    Kernel::Nearest,
                    peak,
                ),
                VideoMetric::SPsnrI => spsnr_frame(
                    &r.y,
                    &d.y,
                    ctx.sphere.as_ref().expect("prepared"),
                    Kernel::Bilinear,
                    peak,
                ),
                VideoMetric::CppPsnr => cpp_psnr_frame(
                    &r.y,
                    &d.y,
                    ctx.cpp.as_ref().expect("prepared"),
                    Kernel::Bilinear,
                    peak,
                ),
                VideoMetric::Ssim => ssim_frame(&r.y, &d.y, peak)?,
                VideoMetric::MsSsim => ms_ssim_frame(&r.y, &d.y, peak)?,
            };
            slot.push(value);
        }
    }
    Ok(metrics
        .iter()
        .zip(raw)
        .map(|(m, values)| MetricScore::from_frames(m.name(), values))
        .collect())
}
