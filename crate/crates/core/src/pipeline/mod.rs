//! Experiment orchestration: configuration, the benchmark grid, synthetic
//! data and report emission.

mod config;
mod grid;
mod reports;
mod synth;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, DEFAULT_VIDEO_METRICS};
pub use grid::{
    render_cell_log, render_failures, render_manifest, run_grid, workers_from_env,
    write_grid_outputs, CellFailure, CellKey, GridAxes, GridResult, GridRun, WORKERS_ENV,
};
pub use reports::{
    render_metric_frames, render_metric_pooled, render_siti_frames, render_siti_pooled,
};
pub use synth::{
    synthesize, SynthOutput, SynthSpec, AUDIO_RANGES, COLUMN_JITTER, TRUTH_AUDIO, TRUTH_MODEL,
    TRUTH_VIDEO, VIDEO_RANGES,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] crate::media::MediaError),
    #[error(transparent)]
    Metric(#[from] crate::metrics::MetricError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
}
