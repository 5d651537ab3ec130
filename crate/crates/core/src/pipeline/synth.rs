//! Synthetic feature tables with a known fusion ground truth.
//!
//! Each row draws a latent audio quality `u_a` and video quality `u_v`
//! uniformly from `[0, 1]`. Every metric column is an affine image of its
//! latent value onto the range in [`AUDIO_RANGES`] / [`VIDEO_RANGES`]. The
//! two ground-truth columns (`ambiqual`, `vmaf`) are exact; the others get
//! a Gaussian jitter of [`COLUMN_JITTER`] in latent units before mapping
//! (and are clamped to their range). The label is
//! `clamp(α + β·q_a + γ·q_v + ζ·q_a·q_v + N(0, noise²), 1, 5)` on the
//! ground-truth pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::PipelineError;
use crate::media::{FeatureRow, FeatureTable, MOS_MAX, MOS_MIN};
use crate::models::LinearAVModel;
use crate::seed::derive_seed;

pub const TRUTH_AUDIO: &str = "ambiqual";
pub const TRUTH_VIDEO: &str = "vmaf";

pub const TRUTH_MODEL: LinearAVModel = LinearAVModel {
    alpha: 1.0,
    beta: 1.0,
    gamma: 0.015,
    zeta: 0.015,
};

/// Standard deviation of the per-column jitter, in latent units.
pub const COLUMN_JITTER: f64 = 0.05;

pub const AUDIO_RANGES: [(&str, f64, f64); 3] = [
    ("peaq", -3.9, -0.2),
    ("visqol", 1.5, 4.7),
    ("ambiqual", 0.3, 0.95),
];

pub const VIDEO_RANGES: [(&str, f64, f64); 13] = [
    ("psnr", 25.0, 50.0),
    ("ws_psnr", 25.0, 50.0),
    ("s_psnr_i", 25.0, 50.0),
    ("s_psnr_nn", 25.0, 50.0),
    ("cf_cpp_psnr", 25.0, 50.0),
    ("cf_s_psnr_i", 25.0, 50.0),
    ("cf_s_psnr_nn", 25.0, 50.0),
    ("ee_ws_psnr", 25.0, 50.0),
    ("ee_s_psnr_nn", 25.0, 50.0),
    ("vmaf_psnr", 25.0, 50.0),
    ("ssim", 0.80, 0.99),
    ("ms_ssim", 0.85, 0.995),
    ("vmaf", 20.0, 98.0),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub contents: usize,
    pub conditions: usize,
    /// Standard deviation of the label noise, in MOS units.
    pub noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub table: FeatureTable,
    pub truth: LinearAVModel,
    pub spec: SynthSpec,
}

impl SynthOutput {
    /// `key = value` description of the generating model.
    pub fn render_truth(&self) -> String {
        let t = &self.truth;
        format!(
            "audio_metric = {TRUTH_AUDIO}\nvideo_metric = {TRUTH_VIDEO}\nalpha = {}\nbeta = {}\ngamma = {}\nzeta = {}\n\
             noise = {}\ncontents = {}\nconditions = {}\nseed = {}\n",
            t.alpha, t.beta, t.gamma, t.zeta, self.spec.noise, self.spec.contents, self.spec.conditions, self.spec.seed
        )
    }
}

fn map(u: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * u.clamp(0.0, 1.0)
}

pub fn synthesize(spec: SynthSpec) -> Result<SynthOutput, PipelineError> {
    if spec.contents < 2 || spec.conditions < 2 {
        return Err(PipelineError::Invalid(format!(
            "need at least 2 contents and 2 conditions, got {} x {}",
            spec.contents, spec.conditions
        )));
    }
    if !(spec.noise.is_finite() && spec.noise >= 0.0) {
        return Err(PipelineError::Invalid(format!(
            "noise {} must be finite and >= 0",
            spec.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &["synth"]));
    let jitter = Normal::new(0.0, COLUMN_JITTER).expect("valid jitter");
    let noise = Normal::new(0.0, spec.noise).expect("checked noise");
    let column = |rng: &mut ChaCha8Rng, name: &str, u: f64, lo: f64, hi: f64, truth: &str| {
        if name == truth {
            map(u, lo, hi)
        } else {
            map(u + jitter.sample(rng), lo, hi)
        }
    };
    let mut rows = Vec::with_capacity(spec.contents * spec.conditions);
    for c in 0..spec.contents {
        for k in 0..spec.conditions {
            let u_a: f64 = rng.random();
            let u_v: f64 = rng.random();
            let audio_scores: Vec<f64> = AUDIO_RANGES
                .iter()
                .map(|&(n, lo, hi)| column(&mut rng, n, u_a, lo, hi, TRUTH_AUDIO))
                .collect();
            let video_scores: Vec<f64> = VIDEO_RANGES
                .iter()
                .map(|&(n, lo, hi)| column(&mut rng, n, u_v, lo, hi, TRUTH_VIDEO))
                .collect();
            let q_a = map(u_a, AUDIO_RANGES[2].1, AUDIO_RANGES[2].2);
            let q_v = map(u_v, VIDEO_RANGES[12].1, VIDEO_RANGES[12].2);
            let clean = TRUTH_MODEL.predict(&crate::models::FeatureVector::new(q_a, q_v));
            let mos_av = (clean + noise.sample(&mut rng)).clamp(MOS_MIN, MOS_MAX);
            rows.push(FeatureRow {
                content_id: format!("C{}", c + 1),
                condition_id: format!("Q{}", k + 1),
                audio_scores,
                video_scores,
                mos_av,
            });
        }
    }
    let table = FeatureTable::new(
        AUDIO_RANGES.iter().map(|r| r.0.to_string()).collect(),
        VIDEO_RANGES.iter().map(|r| r.0.to_string()).collect(),
        rows,
    )?;
    Ok(SynthOutput {
        table,
        truth: TRUTH_MODEL,
        spec,
    })
}
