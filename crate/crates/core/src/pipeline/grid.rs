//! The benchmark grid: every (audio, video, learner, CV) combination.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::{ExperimentConfig, PipelineError};
use crate::eval::{evaluate_cell, observations, CvKind, CvScheme, EvalResult};
use crate::media::{write_result_tables, FeatureTable, MediaError};
use crate::models::{LearnerKind, ModelSpec};
use crate::seed::derive_seed;

/// Environment variable holding the worker thread count for grid runs.
pub const WORKERS_ENV: &str = "SPHEREQA_WORKERS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridAxes {
    pub audio: Vec<String>,
    pub video: Vec<String>,
    pub learners: Vec<LearnerKind>,
    pub cv: Vec<CvKind>,
}

impl GridAxes {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            audio: cfg.audio_metrics.clone(),
            video: cfg.video_metrics.clone(),
            learners: cfg.learners.clone(),
            cv: cfg.cv_schemes.clone(),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.audio.len() * self.video.len() * self.learners.len() * self.cv.len()
    }

    /// All cells in table order: video, learner, audio, CV.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::with_capacity(self.cell_count());
        for video in &self.video {
            for &learner in &self.learners {
                for audio in &self.audio {
                    for &cv in &self.cv {
                        out.push(CellKey {
                            audio: audio.clone(),
                            video: video.clone(),
                            learner,
                            cv,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub audio: String,
    pub video: String,
    pub learner: LearnerKind,
    pub cv: CvKind,
}

impl CellKey {
    pub fn seed(&self, experiment_seed: u64) -> u64 {
        derive_seed(
            experiment_seed,
            &[
                &self.audio,
                &self.video,
                self.learner.name(),
                self.cv.name(),
            ],
        )
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}",
            self.audio, self.video, self.learner, self.cv
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub axes: GridAxes,
    pub cells: BTreeMap<CellKey, EvalResult>,
    pub config_fingerprint: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub key: CellKey,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct GridRun {
    pub result: GridResult,
    pub failures: Vec<CellFailure>,
    pub seed: u64,
    pub wall_seconds: f64,
    pub workers: usize,
}

impl GridRun {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
}

fn model_spec(cfg: &ExperimentConfig, learner: LearnerKind) -> ModelSpec {
    ModelSpec {
        tune_length: if learner == LearnerKind::Lm {
            1
        } else {
            cfg.tune_length
        },
        feature_mode: cfg.feature_mode,
        fixed: cfg.fixed,
        ..ModelSpec::new(learner)
    }
}

fn check_columns(cfg: &ExperimentConfig, table: &FeatureTable) -> Result<(), PipelineError> {
    for a in &cfg.audio_metrics {
        if table.audio_index(a).is_none() {
            return Err(PipelineError::Data(MediaError::MissingColumn(a.clone())));
        }
    }
    for v in &cfg.video_metrics {
        if table.video_index(v).is_none() {
            return Err(PipelineError::Data(MediaError::MissingColumn(v.clone())));
        }
    }
    Ok(())
}

/// Runs every cell of the configured grid. Cells that fail are collected
/// rather than aborting the run; the worker count never changes results.
pub fn run_grid(
    cfg: &ExperimentConfig,
    table: &FeatureTable,
    workers: Option<usize>,
) -> Result<GridRun, PipelineError> {
    cfg.validate()?;
    check_columns(cfg, table)?;
    let axes = GridAxes::from_config(cfg);
    let keys = axes.cells();
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| PipelineError::Runtime(e.to_string()))?;
    let used = pool.current_num_threads();
    let outcomes: Vec<Result<EvalResult, String>> = pool.install(|| {
        keys.par_iter()
            .map(|key| {
                let rows =
                    observations(table, &key.audio, &key.video).map_err(|e| e.to_string())?;
                let spec = model_spec(cfg, key.learner);
                let scheme = CvScheme {
                    kind: key.cv,
                    k: cfg.kfold_k,
                    seed: 0,
                };
                let r = evaluate_cell(&rows, &spec, &scheme, &cfg.eval, key.seed(cfg.seed))
                    .map_err(|e| e.to_string());
                match &r {
                    Ok(res) => log::info!("cell {key}: rmse {:.4}", res.rmse),
                    Err(e) => log::warn!("cell {key} failed: {e}"),
                }
                r
            })
            .collect()
    });
    let mut cells = BTreeMap::new();
    let mut failures = Vec::new();
    for (key, outcome) in keys.into_iter().zip(outcomes) {
        match outcome {
            Ok(r) => {
                cells.insert(key, r);
            }
            Err(message) => failures.push(CellFailure { key, message }),
        }
    }
    Ok(GridRun {
        result: GridResult {
            axes,
            cells,
            config_fingerprint: cfg.fingerprint(),
        },
        failures,
        seed: cfg.seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        workers: used,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    std::fs::write(path, bytes).map_err(|source| {
        PipelineError::Data(MediaError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

/// Per-cell log with full-precision values, in table order.
pub fn render_cell_log(run: &GridRun, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "audio_metric,video_metric,learner,cv,seed,status,pcc,srocc,rmse,cv_rmse,n_test,folds,degenerate_folds"
    )?;
    for key in run.result.axes.cells() {
        let seed = key.seed(run.seed);
        let prefix = format!(
            "{},{},{},{},{seed}",
            key.audio, key.video, key.learner, key.cv
        );
        match run.result.cells.get(&key) {
            Some(r) => writeln!(
                out,
                "{prefix},ok,{},{},{},{},{},{},{}",
                opt(r.pcc),
                opt(r.srocc),
                r.rmse,
                opt(r.cv_rmse),
                r.n_test,
                r.folds,
                r.degenerate_folds
            )?,
            None => writeln!(out, "{prefix},failed,NA,NA,NA,NA,0,0,0")?,
        }
    }
    Ok(())
}

pub fn render_failures(run: &GridRun, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "audio_metric,video_metric,learner,cv,error")?;
    for f in &run.failures {
        let msg = f.message.replace('"', "'");
        writeln!(
            out,
            "{},{},{},{},\"{msg}\"",
            f.key.audio, f.key.video, f.key.learner, f.key.cv
        )?;
    }
    Ok(())
}

pub fn render_manifest(run: &GridRun, cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("tool = sphereqa {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!(
        "config_fingerprint = {}\n",
        run.result.config_fingerprint
    ));
    s.push_str(&format!("seed = {}\n", run.seed));
    s.push_str(&format!("cells = {}\n", run.result.axes.cell_count()));
    s.push_str(&format!("completed = {}\n", run.result.cells.len()));
    s.push_str(&format!("failed = {}\n", run.failures.len()));
    s.push_str(&format!("workers = {}\n", run.workers));
    s.push_str(&format!("wall_seconds = {:.3}\n", run.wall_seconds));
    s.push_str("\n# resolved configuration\n");
    s.push_str(&cfg.canonical());
    s
}

/// Writes the manifest, per-cell log and failure list into `dir`, plus the
/// three result tables when every cell succeeded.
pub fn write_grid_outputs(
    run: &GridRun,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        PipelineError::Data(MediaError::Io {
            path: dir.to_path_buf(),
            source,
        })
    })?;
    let mut written = Vec::new();
    if run.is_complete() {
        written.extend(write_result_tables(&run.result, dir)?);
    }
    let mut buf = Vec::new();
    render_cell_log(run, &mut buf).expect("writing to memory");
    let path = dir.join("cells.csv");
    write_file(&path, &buf)?;
    written.push(path);

    let mut buf = Vec::new();
    render_failures(run, &mut buf).expect("writing to memory");
    let path = dir.join("failures.csv");
    write_file(&path, &buf)?;
    written.push(path);

    let path = dir.join("manifest.txt");
    write_file(&path, render_manifest(run, cfg).as_bytes())?;
    written.push(path);
    Ok(written)
}
