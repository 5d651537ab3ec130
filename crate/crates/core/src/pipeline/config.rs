//! Experiment configuration: flat `key = value` text, one entry per line,
//! list values separated by commas, `#` starting a comment.
//!
//! ```text
//! feature_table = features.csv
//! audio_metrics = peaq, visqol, ambiqual
//! learners = LM, DT, RF, SVM
//! cv_schemes = kfold, loco
//! seed = 1
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::eval::{CvKind, EvalSettings};
use crate::media::DEFAULT_AUDIO_METRICS;
use crate::models::{FeatureMode, FixedSettings, LearnerKind, DEFAULT_TUNE_LENGTH};

/// The default video metric columns, in table order.
pub const DEFAULT_VIDEO_METRICS: [&str; 13] = [
    "psnr",
    "ws_psnr",
    "s_psnr_i",
    "s_psnr_nn",
    "cf_cpp_psnr",
    "cf_s_psnr_i",
    "cf_s_psnr_nn",
    "ee_ws_psnr",
    "ee_s_psnr_nn",
    "vmaf_psnr",
    "ssim",
    "ms_ssim",
    "vmaf",
];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub feature_table: PathBuf,
    pub audio_metrics: Vec<String>,
    pub video_metrics: Vec<String>,
    pub learners: Vec<LearnerKind>,
    pub cv_schemes: Vec<CvKind>,
    pub kfold_k: usize,
    pub eval: EvalSettings,
    pub tune_length: usize,
    pub feature_mode: FeatureMode,
    pub fixed: FixedSettings,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(feature_table: impl Into<PathBuf>) -> Self {
        Self {
            feature_table: feature_table.into(),
            audio_metrics: DEFAULT_AUDIO_METRICS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            video_metrics: DEFAULT_VIDEO_METRICS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            learners: LearnerKind::ALL.to_vec(),
            cv_schemes: CvKind::ALL.to_vec(),
            kfold_k: 10,
            eval: EvalSettings::default(),
            tune_length: DEFAULT_TUNE_LENGTH,
            feature_mode: FeatureMode::Interaction,
            fixed: FixedSettings::default(),
            seed: 1,
            output_dir: PathBuf::from("results"),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.audio_metrics.len()
            * self.video_metrics.len()
            * self.learners.len()
            * self.cv_schemes.len()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.grid_size() == 0 {
            return invalid("every grid axis needs at least one entry".into());
        }
        for (name, list) in [
            ("audio_metrics", &self.audio_metrics),
            ("video_metrics", &self.video_metrics),
        ] {
            for (i, a) in list.iter().enumerate() {
                if list[..i].contains(a) {
                    return invalid(format!("{name} lists `{a}` twice"));
                }
            }
        }
        for (i, l) in self.learners.iter().enumerate() {
            if self.learners[..i].contains(l) {
                return invalid(format!("learner {l} listed twice"));
            }
        }
        for (i, c) in self.cv_schemes.iter().enumerate() {
            if self.cv_schemes[..i].contains(c) {
                return invalid(format!("CV scheme {c} listed twice"));
            }
        }
        if self.kfold_k < 2 || self.eval.inner_k < 2 {
            return invalid("fold counts must be at least 2".into());
        }
        if !(self.eval.split_ratio > 0.0 && self.eval.split_ratio < 1.0) {
            return invalid(format!(
                "split_ratio {} outside (0, 1)",
                self.eval.split_ratio
            ));
        }
        if self.tune_length == 0 {
            return invalid("tune_length must be at least 1".into());
        }
        let f = &self.fixed;
        if f.ntree == 0 || f.forest_node_size == 0 || f.svr_max_iter == 0 {
            return invalid("ntree, forest_node_size and svr_max_iter must be positive".into());
        }
        if f.svr_epsilon.is_nan()
            || f.svr_epsilon < 0.0
            || f.svr_tolerance.is_nan()
            || f.svr_tolerance <= 0.0
        {
            return invalid("svr_epsilon must be >= 0 and svr_tolerance > 0".into());
        }
        Ok(())
    }

    /// Canonical text listing every field; the fingerprint hashes it.
    pub fn canonical(&self) -> String {
        let join = |v: &[String]| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "feature_table={}", self.feature_table.display());
        let _ = writeln!(s, "audio_metrics={}", join(&self.audio_metrics));
        let _ = writeln!(s, "video_metrics={}", join(&self.video_metrics));
        let learners: Vec<String> = self.learners.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(s, "learners={}", join(&learners));
        let cvs: Vec<String> = self.cv_schemes.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "cv_schemes={}", join(&cvs));
        let _ = writeln!(s, "kfold_k={}", self.kfold_k);
        let _ = writeln!(s, "inner_k={}", self.eval.inner_k);
        let _ = writeln!(s, "split_ratio={:?}", self.eval.split_ratio);
        let _ = writeln!(s, "tune_length={}", self.tune_length);
        let _ = writeln!(s, "feature_mode={}", self.feature_mode);
        let _ = writeln!(s, "ntree={}", self.fixed.ntree);
        let _ = writeln!(s, "forest_node_size={}", self.fixed.forest_node_size);
        let _ = writeln!(s, "svr_epsilon={:?}", self.fixed.svr_epsilon);
        let _ = writeln!(s, "svr_tolerance={:?}", self.fixed.svr_tolerance);
        let _ = writeln!(s, "svr_max_iter={}", self.fixed.svr_max_iter);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "output_dir={}", self.output_dir.display());
        s
    }

    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

fn list<T>(raw: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn scalar<T: FromStr>(raw: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| e.to_string())
}

/// Parses config text; `base` resolves relative paths.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::new(PathBuf::new());
    let mut seen: Vec<String> = Vec::new();
    let mut have_table = false;
    for (n, raw_line) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim();
        if seen.contains(&key) {
            return Err(ConfigError::DuplicateKey { line, key });
        }
        let bad = |message: String| ConfigError::Value {
            line,
            key: key.clone(),
            message,
        };
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        match key.as_str() {
            "feature_table" => {
                cfg.feature_table = path(value);
                have_table = true;
            }
            "output_dir" => cfg.output_dir = path(value),
            "audio_metrics" => {
                cfg.audio_metrics = list(value, |s| Ok(s.to_string())).map_err(bad)?
            }
            "video_metrics" => {
                cfg.video_metrics = list(value, |s| Ok(s.to_string())).map_err(bad)?
            }
            "learners" => {
                cfg.learners = list(value, |s| {
                    s.parse()
                        .map_err(|e: crate::models::ModelError| e.to_string())
                })
                .map_err(bad)?
            }
            "cv_schemes" => {
                cfg.cv_schemes = list(value, |s| {
                    s.parse().map_err(|e: crate::eval::EvalError| e.to_string())
                })
                .map_err(bad)?
            }
            "kfold_k" => cfg.kfold_k = scalar(value).map_err(bad)?,
            "inner_k" => cfg.eval.inner_k = scalar(value).map_err(bad)?,
            "split_ratio" => cfg.eval.split_ratio = scalar(value).map_err(bad)?,
            "tune_length" => cfg.tune_length = scalar(value).map_err(bad)?,
            "feature_mode" => {
                cfg.feature_mode = value
                    .parse()
                    .map_err(|e: crate::models::ModelError| bad(e.to_string()))?
            }
            "ntree" => cfg.fixed.ntree = scalar(value).map_err(bad)?,
            "forest_node_size" => cfg.fixed.forest_node_size = scalar(value).map_err(bad)?,
            "svr_epsilon" => cfg.fixed.svr_epsilon = scalar(value).map_err(bad)?,
            "svr_tolerance" => cfg.fixed.svr_tolerance = scalar(value).map_err(bad)?,
            "svr_max_iter" => cfg.fixed.svr_max_iter = scalar(value).map_err(bad)?,
            "seed" => cfg.seed = scalar(value).map_err(bad)?,
            _ => return Err(ConfigError::UnknownKey { line, key }),
        }
        seen.push(key);
    }
    if !have_table {
        return Err(ConfigError::Missing("feature_table"));
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_give_full_grid() {
        let cfg = parse_config("feature_table = t.csv\n", Path::new("/data")).unwrap();
        assert_eq!(cfg.grid_size(), 312);
        assert_eq!(cfg.feature_table, PathBuf::from("/data/t.csv"));
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn lists_comments_and_paths() {
        let text = "\
# reduced grid
feature_table = /abs/t.csv
audio_metrics = ambiqual
video_metrics = vmaf , psnr   # trailing comment
learners = lm
cv_schemes = loco
output_dir = out
seed = 42
";
        let cfg = parse_config(text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.feature_table, PathBuf::from("/abs/t.csv"));
        assert_eq!(cfg.output_dir, PathBuf::from("/cfg/out"));
        assert_eq!(cfg.video_metrics, vec!["vmaf", "psnr"]);
        assert_eq!(cfg.learners, vec![LearnerKind::Lm]);
        assert_eq!(cfg.cv_schemes, vec![CvKind::LeaveOneContentOut]);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.grid_size(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let base = Path::new(".");
        assert!(matches!(
            parse_config("bogus = 1\nfeature_table=x", base),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("feature_table=x\nseed=a", base),
            Err(ConfigError::Value { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("feature_table=x\nseed", base),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("seed=1", base),
            Err(ConfigError::Missing("feature_table"))
        ));
        assert!(matches!(
            parse_config("feature_table=x\nseed=1\nseed=2", base),
            Err(ConfigError::DuplicateKey { line: 3, .. })
        ));
        assert!(matches!(
            parse_config("feature_table=x\nlearners=LM,LM", base),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            parse_config("feature_table=x\nsplit_ratio=1.5", base),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn fingerprint_tracks_every_field() {
        let base = ExperimentConfig::new("t.csv");
        let fp = base.fingerprint();
        assert_eq!(fp, ExperimentConfig::new("t.csv").fingerprint());
        let variants: Vec<ExperimentConfig> = vec![
            ExperimentConfig {
                feature_table: "u.csv".into(),
                ..base.clone()
            },
            ExperimentConfig {
                audio_metrics: vec!["peaq".into()],
                ..base.clone()
            },
            ExperimentConfig {
                video_metrics: vec!["vmaf".into()],
                ..base.clone()
            },
            ExperimentConfig {
                learners: vec![LearnerKind::Svm],
                ..base.clone()
            },
            ExperimentConfig {
                cv_schemes: vec![CvKind::KFold],
                ..base.clone()
            },
            ExperimentConfig {
                kfold_k: 5,
                ..base.clone()
            },
            ExperimentConfig {
                eval: EvalSettings {
                    split_ratio: 0.75,
                    ..base.eval
                },
                ..base.clone()
            },
            ExperimentConfig {
                eval: EvalSettings {
                    inner_k: 5,
                    ..base.eval
                },
                ..base.clone()
            },
            ExperimentConfig {
                tune_length: 3,
                ..base.clone()
            },
            ExperimentConfig {
                feature_mode: FeatureMode::Pair,
                ..base.clone()
            },
            ExperimentConfig {
                fixed: FixedSettings {
                    ntree: 10,
                    ..base.fixed
                },
                ..base.clone()
            },
            ExperimentConfig {
                fixed: FixedSettings {
                    forest_node_size: 3,
                    ..base.fixed
                },
                ..base.clone()
            },
            ExperimentConfig {
                fixed: FixedSettings {
                    svr_epsilon: 0.2,
                    ..base.fixed
                },
                ..base.clone()
            },
            ExperimentConfig {
                fixed: FixedSettings {
                    svr_tolerance: 1e-4,
                    ..base.fixed
                },
                ..base.clone()
            },
            ExperimentConfig {
                fixed: FixedSettings {
                    svr_max_iter: 9,
                    ..base.fixed
                },
                ..base.clone()
            },
            ExperimentConfig {
                seed: 2,
                ..base.clone()
            },
            ExperimentConfig {
                output_dir: "elsewhere".into(),
                ..base.clone()
            },
        ];
        let mut prints = vec![fp];
        for v in variants {
            let p = v.fingerprint();
            assert!(!prints.contains(&p), "{}", v.canonical());
            prints.push(p);
        }
    }
}
