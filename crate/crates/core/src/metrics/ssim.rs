//! SSIM and five-scale MS-SSIM on luma.
//!
//! Local statistics use an 11×11 Gaussian window (σ = 1.5) evaluated only
//! where the window fits inside the image. `C1 = (0.01 L)²`, `C2 = (0.03 L)²`.

use rayon::prelude::*;

use super::score::score_sequence;
use super::{MetricError, MetricScore};
use crate::media::{Plane, SequencePair};

pub const WINDOW: usize = 11;
pub const SIGMA: f64 = 1.5;
pub const MS_SSIM_EXPONENTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
pub const MS_SSIM_MIN_SIZE: usize = WINDOW << 4;

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; WINDOW] {
    let mut taps = [0.0; WINDOW];
    let half = (WINDOW / 2) as f64;
    for (k, t) in taps.iter_mut().enumerate() {
        let d = k as f64 - half;
        *t = (-(d * d) / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// A real-valued image, used between MS-SSIM scales.
#[derive(Debug, Clone)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl From<&Plane> for Image {
    fn from(p: &Plane) -> Self {
        Self {
            width: p.width,
            height: p.height,
            data: p.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

impl Image {
    /// 2×2 box average followed by decimation.
    pub fn downsample(&self) -> Image {
        let w = self.width / 2;
        let h = self.height / 2;
        let mut data = Vec::with_capacity(w * h);
        for j in 0..h {
            for i in 0..w {
                let at = |x: usize, y: usize| self.data[y * self.width + x];
                data.push(
                    (at(2 * i, 2 * j)
                        + at(2 * i + 1, 2 * j)
                        + at(2 * i, 2 * j + 1)
                        + at(2 * i + 1, 2 * j + 1))
                        / 4.0,
                );
            }
        }
        Image {
            width: w,
            height: h,
            data,
        }
    }
}

/// Mean luminance, contrast-structure and SSIM terms over all window positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimTerms {
    pub luminance: f64,
    pub contrast_structure: f64,
    pub ssim: f64,
}

fn filter_valid(img: &[f64], width: usize, height: usize, taps: &[f64; WINDOW]) -> Vec<f64> {
    let ow = width - WINDOW + 1;
    let oh = height - WINDOW + 1;
    // Horizontal pass keeps full height.
    let horiz: Vec<f64> = (0..height)
        .into_par_iter()
        .flat_map_iter(|j| {
            let row = &img[j * width..(j + 1) * width];
            (0..ow).map(move |i| {
                row[i..i + WINDOW]
                    .iter()
                    .zip(taps)
                    .map(|(v, t)| v * t)
                    .sum::<f64>()
            })
        })
        .collect();
    (0..oh)
        .into_par_iter()
        .flat_map_iter(|j| {
            let horiz = &horiz;
            (0..ow).map(move |i| {
                (0..WINDOW)
                    .map(|k| horiz[(j + k) * ow + i] * taps[k])
                    .sum::<f64>()
            })
        })
        .collect()
}

pub fn ssim_terms(a: &Image, b: &Image, peak: f64) -> Result<SsimTerms, MetricError> {
    if a.width < WINDOW || a.height < WINDOW {
        return Err(MetricError::TooSmall {
            width: a.width,
            height: a.height,
            min: WINDOW,
        });
    }
    let c1 = (0.01 * peak).powi(2);
    let c2 = (0.03 * peak).powi(2);
    let taps = gaussian_taps();
    let (w, h) = (a.width, a.height);
    let aa: Vec<f64> = a.data.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.data.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
    let mu_a = filter_valid(&a.data, w, h, &taps);
    let mu_b = filter_valid(&b.data, w, h, &taps);
    let e_aa = filter_valid(&aa, w, h, &taps);
    let e_bb = filter_valid(&bb, w, h, &taps);
    let e_ab = filter_valid(&ab, w, h, &taps);

    let (mut l_sum, mut cs_sum, mut s_sum) = (0.0, 0.0, 0.0);
    for k in 0..mu_a.len() {
        let (ma, mb) = (mu_a[k], mu_b[k]);
        let var_a = e_aa[k] - ma * ma;
        let var_b = e_bb[k] - mb * mb;
        let cov = e_ab[k] - ma * mb;
        let l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        let cs = (2.0 * cov + c2) / (var_a + var_b + c2);
        l_sum += l;
        cs_sum += cs;
        s_sum += l * cs;
    }
    let n = mu_a.len() as f64;
    Ok(SsimTerms {
        luminance: l_sum / n,
        contrast_structure: cs_sum / n,
        ssim: s_sum / n,
    })
}

pub fn ssim_frame(reference: &Plane, distorted: &Plane, peak: f64) -> Result<f64, MetricError> {
    Ok(ssim_terms(&reference.into(), &distorted.into(), peak)?.ssim)
}

/// `l₅^w₅ · Π cs_j^w_j` over five dyadic scales. Negative mean terms are
/// clamped to zero before exponentiation.
pub fn ms_ssim_frame(reference: &Plane, distorted: &Plane, peak: f64) -> Result<f64, MetricError> {
    if reference.width < MS_SSIM_MIN_SIZE || reference.height < MS_SSIM_MIN_SIZE {
        return Err(MetricError::TooSmall {
            width: reference.width,
            height: reference.height,
            min: MS_SSIM_MIN_SIZE,
        });
    }
    let mut a = Image::from(reference);
    let mut b = Image::from(distorted);
    let mut score = 1.0;
    for (scale, &weight) in MS_SSIM_EXPONENTS.iter().enumerate() {
        let terms = ssim_terms(&a, &b, peak)?;
        score *= terms.contrast_structure.max(0.0).powf(weight);
        if scale + 1 == MS_SSIM_EXPONENTS.len() {
            score *= terms.luminance.max(0.0).powf(weight);
        } else {
            a = a.downsample();
            b = b.downsample();
        }
    }
    Ok(score)
}

pub fn ssim(pair: &mut SequencePair<'_>) -> Result<MetricScore, MetricError> {
    score_sequence(pair, "ssim", |r, d| ssim_frame(&r.y, &d.y, r.peak()))
}

pub fn ms_ssim(pair: &mut SequencePair<'_>) -> Result<MetricScore, MetricError> {
    score_sequence(pair, "ms_ssim", |r, d| ms_ssim_frame(&r.y, &d.y, r.peak()))
}
