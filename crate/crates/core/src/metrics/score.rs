use rayon::prelude::*;

use super::MetricError;
use crate::media::{SequencePair, YuvFrame};

/// Finite stand-in for the infinite PSNR of identical frames.
pub const PSNR_CAP_DB: f64 = 100.0;

/// Per-frame scores of one metric over a sequence and their temporal mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricScore {
    pub metric_name: String,
    pub per_frame: Vec<f64>,
    pub pooled: f64,
    /// Number of frames whose infinite score was replaced by [`PSNR_CAP_DB`].
    pub capped_frames: usize,
}

impl MetricScore {
    /// Caps infinite values and pools by arithmetic mean in frame order.
    pub fn from_frames(metric_name: impl Into<String>, raw: Vec<f64>) -> Self {
        let mut capped_frames = 0;
        let per_frame: Vec<f64> = raw
            .into_iter()
            .map(|v| {
                if v == f64::INFINITY {
                    capped_frames += 1;
                    PSNR_CAP_DB
                } else {
                    v
                }
            })
            .collect();
        let pooled = if per_frame.is_empty() {
            f64::NAN
        } else {
            per_frame.iter().sum::<f64>() / per_frame.len() as f64
        };
        Self {
            metric_name: metric_name.into(),
            per_frame,
            pooled,
            capped_frames,
        }
    }
}

/// `10 log10(peak² / mse)`; infinite for zero error.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse <= 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub(crate) fn check_pair(reference: &YuvFrame, distorted: &YuvFrame) -> Result<(), MetricError> {
    if !reference.same_geometry(distorted) {
        return Err(MetricError::GeometryMismatch {
            reference: (reference.width, reference.height),
            distorted: (distorted.width, distorted.height),
        });
    }
    if reference.bit_depth != distorted.bit_depth {
        return Err(MetricError::BitDepthMismatch {
            reference: reference.bit_depth,
            distorted: distorted.bit_depth,
        });
    }
    Ok(())
}

/// Sums `f(row)` over rows, evaluating rows in parallel but adding the
/// partial sums in row order so the result does not depend on scheduling.
pub(crate) fn ordered_row_sum(rows: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let partial: Vec<f64> = (0..rows).into_par_iter().map(f).collect();
    partial.iter().sum()
}

/// Reads every frame pair in order and scores it with `f`.
pub(crate) fn score_sequence(
    pair: &mut SequencePair<'_>,
    name: &str,
    mut f: impl FnMut(&YuvFrame, &YuvFrame) -> Result<f64, MetricError>,
) -> Result<MetricScore, MetricError> {
    if pair.frame_count() == 0 {
        return Err(MetricError::EmptySequence);
    }
    let mut raw = Vec::with_capacity(pair.frame_count());
    for idx in 0..pair.frame_count() {
        let (r, d) = pair.read(idx)?;
        check_pair(&r, &d)?;
        raw.push(f(&r, &d)?);
    }
    Ok(MetricScore::from_frames(name, raw))
}
