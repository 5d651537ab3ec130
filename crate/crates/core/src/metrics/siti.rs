//! Spatial and temporal information (SI / TI) of a sequence.
//!
//! SI is the spatial standard deviation of the Sobel gradient magnitude over
//! interior pixels; TI the spatial standard deviation of successive frame
//! differences. Both pool by maximum over time.

use super::MetricError;
use crate::media::{FrameSource, Plane};

#[derive(Debug, Clone, PartialEq)]
pub struct SiTiResult {
    pub si: f64,
    /// Zero when the sequence has a single frame; see `ti_defined`.
    pub ti: f64,
    pub ti_defined: bool,
    pub per_frame_si: Vec<f64>,
    pub per_frame_ti: Vec<f64>,
}

fn population_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values
        .clone()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return 0.0;
    }
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    var.sqrt()
}

/// Sobel gradient magnitudes at interior pixels, row-major.
pub fn sobel_magnitude(plane: &Plane) -> Vec<f64> {
    let (w, h) = (plane.width, plane.height);
    if w < 3 || h < 3 {
        return Vec::new();
    }
    let p = |i: usize, j: usize| f64::from(plane.get(i, j));
    let mut out = Vec::with_capacity((w - 2) * (h - 2));
    for j in 1..h - 1 {
        for i in 1..w - 1 {
            let gx = (p(i + 1, j - 1) + 2.0 * p(i + 1, j) + p(i + 1, j + 1))
                - (p(i - 1, j - 1) + 2.0 * p(i - 1, j) + p(i - 1, j + 1));
            let gy = (p(i - 1, j + 1) + 2.0 * p(i, j + 1) + p(i + 1, j + 1))
                - (p(i - 1, j - 1) + 2.0 * p(i, j - 1) + p(i + 1, j - 1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

pub fn spatial_information(plane: &Plane) -> f64 {
    population_std(sobel_magnitude(plane).into_iter())
}

pub fn temporal_information(previous: &Plane, current: &Plane) -> f64 {
    population_std(
        current
            .data
            .iter()
            .zip(&previous.data)
            .map(|(&c, &p)| f64::from(c) - f64::from(p)),
    )
}

pub fn si_ti(source: &mut dyn FrameSource) -> Result<SiTiResult, MetricError> {
    if source.frame_count() == 0 {
        return Err(MetricError::EmptySequence);
    }
    let mut per_frame_si = Vec::with_capacity(source.frame_count());
    let mut per_frame_ti = Vec::new();
    let mut previous: Option<Plane> = None;
    for idx in 0..source.frame_count() {
        let frame = source.read_frame(idx)?;
        per_frame_si.push(spatial_information(&frame.y));
        if let Some(prev) = &previous {
            per_frame_ti.push(temporal_information(prev, &frame.y));
        }
        previous = Some(frame.y);
    }
    let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    Ok(SiTiResult {
        si: max(&per_frame_si),
        ti: max(&per_frame_ti),
        ti_defined: !per_frame_ti.is_empty(),
        per_frame_si,
        per_frame_ti,
    })
}
