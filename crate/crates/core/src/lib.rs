//! Quality assessment for omnidirectional audiovisual content: spherical
//! video metrics on equirectangular frames, audio/video fusion learners and
//! the evaluation grid that compares them.

pub mod eval;
pub mod media;
pub mod metrics;
pub mod models;
pub mod pipeline;
pub mod seed;
pub mod sphere;

pub use eval::{CvKind, CvScheme, EvalResult, Observation};
pub use media::{FeatureTable, MediaError, Plane, YuvFrame};
pub use metrics::{MetricError, MetricScore, VideoMetric};
pub use models::{FeatureMode, FeatureVector, LearnerKind, ModelError, ModelSpec, TrainedModel};
pub use pipeline::{ExperimentConfig, GridResult, PipelineError};
pub use sphere::{ErpGeometry, GeometryError, LatLon};
