//! Regression learners mapping (audio score, video score) to predicted
//! audiovisual MOS: linear (with interaction), CART tree, random forest and
//! RBF support vector regression, plus random hyperparameter search.

mod features;
mod forest;
mod linear;
mod search;
mod svr;
mod text;
mod tree;

use std::fmt;
use std::str::FromStr;

pub use features::{FeatureMode, FeatureVector, Samples};
pub use forest::{fit_forest, ForestModel, ForestParams, DEFAULT_NODE_SIZE, DEFAULT_NTREE};
pub use linear::{fit_linear, LinearAVModel, RANK_TOLERANCE};
pub use search::{random_search, CandidateScore, SearchOutcome, SearchSpace};
pub use svr::{
    fit_svr, rbf_kernel, FeatureScaler, SvrModel, SvrParams, DEFAULT_EPSILON, DEFAULT_MAX_ITER,
    DEFAULT_TOLERANCE,
};
pub use text::{read_model, write_model};
pub use tree::{fit_tree, Node, RegressionTree, TreeParams};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error(
        "design matrix is rank deficient: column `{column}` is collinear with earlier columns"
    )]
    RankDeficient { column: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),
    #[error("SMO did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    NotConverged { iterations: usize, violation: f64 },
    #[error("every one of the {0} search candidates failed")]
    AllCandidatesFailed(usize),
    #[error("model text: {0}")]
    Parse(String),
    #[error(transparent)]
    Eval(Box<crate::eval::EvalError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LearnerKind {
    Lm,
    Dt,
    Rf,
    Svm,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Lm,
        LearnerKind::Dt,
        LearnerKind::Rf,
        LearnerKind::Svm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Lm => "LM",
            LearnerKind::Dt => "DT",
            LearnerKind::Rf => "RF",
            LearnerKind::Svm => "SVM",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lm" | "linear" => Ok(LearnerKind::Lm),
            "dt" | "tree" | "rpart" => Ok(LearnerKind::Dt),
            "rf" | "forest" => Ok(LearnerKind::Rf),
            "svm" | "svr" => Ok(LearnerKind::Svm),
            other => Err(ModelError::Parse(format!("unknown learner `{other}`"))),
        }
    }
}

/// Searched hyperparameters of one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyperparams {
    Linear,
    Tree(TreeParams),
    Forest { mtry: usize },
    Svm { c: f64, sigma: f64 },
}

impl fmt::Display for Hyperparams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperparams::Linear => write!(f, "-"),
            Hyperparams::Tree(p) => write!(f, "minsplit={} maxdepth={}", p.min_split, p.max_depth),
            Hyperparams::Forest { mtry } => write!(f, "mtry={mtry}"),
            Hyperparams::Svm { c, sigma } => write!(f, "c={c:.6e} sigma={sigma:.6e}"),
        }
    }
}

/// Settings that stay fixed during search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedSettings {
    pub ntree: usize,
    pub forest_node_size: usize,
    pub svr_epsilon: f64,
    pub svr_tolerance: f64,
    pub svr_max_iter: usize,
}

impl Default for FixedSettings {
    fn default() -> Self {
        Self {
            ntree: DEFAULT_NTREE,
            forest_node_size: DEFAULT_NODE_SIZE,
            svr_epsilon: DEFAULT_EPSILON,
            svr_tolerance: DEFAULT_TOLERANCE,
            svr_max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// A learner with its search budget and fixed settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: LearnerKind,
    pub tune_length: usize,
    pub feature_mode: FeatureMode,
    pub fixed: FixedSettings,
    pub space: SearchSpace,
    pub seed: u64,
}

/// Default search budget for the tuned learners.
pub const DEFAULT_TUNE_LENGTH: usize = 15;

impl ModelSpec {
    pub fn new(kind: LearnerKind) -> Self {
        Self {
            kind,
            tune_length: if kind == LearnerKind::Lm {
                1
            } else {
                DEFAULT_TUNE_LENGTH
            },
            feature_mode: FeatureMode::Interaction,
            fixed: FixedSettings::default(),
            space: SearchSpace::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Learner {
    Linear(LinearAVModel),
    Tree(RegressionTree),
    Forest(ForestModel),
    Svr(SvrModel),
}

/// A fitted model. Construction only happens through fitting or parsing, so
/// every value is ready to predict.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub feature_mode: FeatureMode,
    pub hyperparams: Hyperparams,
    pub learner: Learner,
}

impl TrainedModel {
    pub fn kind(&self) -> LearnerKind {
        match self.learner {
            Learner::Linear(_) => LearnerKind::Lm,
            Learner::Tree(_) => LearnerKind::Dt,
            Learner::Forest(_) => LearnerKind::Rf,
            Learner::Svr(_) => LearnerKind::Svm,
        }
    }
}

/// Raw model output; no clamping to the MOS scale.
pub fn predict(model: &TrainedModel, x: &FeatureVector) -> f64 {
    match &model.learner {
        Learner::Linear(m) => m.predict(x),
        Learner::Tree(t) => t.predict(&model.feature_mode.expand(x)),
        Learner::Forest(f) => f.predict(&model.feature_mode.expand(x)),
        Learner::Svr(s) => s.predict(&model.feature_mode.expand(x)),
    }
}

/// Fits one learner with fixed hyperparameters.
pub fn fit_model(
    hyper: Hyperparams,
    fixed: &FixedSettings,
    mode: FeatureMode,
    features: &[FeatureVector],
    targets: &[f64],
    seed: u64,
) -> Result<TrainedModel, ModelError> {
    let samples = || Samples::from_features(features, targets, mode);
    let learner = match hyper {
        Hyperparams::Linear => Learner::Linear(fit_linear(features, targets, mode)?),
        Hyperparams::Tree(p) => {
            if features.is_empty() {
                return Err(ModelError::TooFewRows { needed: 1, got: 0 });
            }
            Learner::Tree(fit_tree(&samples(), p))
        }
        Hyperparams::Forest { mtry } => {
            let params = ForestParams {
                min_split: fixed.forest_node_size,
                ..ForestParams::new(fixed.ntree, mtry)
            };
            Learner::Forest(fit_forest(&samples(), params, seed)?)
        }
        Hyperparams::Svm { c, sigma } => {
            let params = SvrParams {
                c,
                sigma,
                epsilon: fixed.svr_epsilon,
                tolerance: fixed.svr_tolerance,
                max_iter: fixed.svr_max_iter,
            };
            Learner::Svr(fit_svr(&samples(), params)?)
        }
    };
    Ok(TrainedModel {
        feature_mode: mode,
        hyperparams: hyper,
        learner,
    })
}
