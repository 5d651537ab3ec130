//! Agreement statistics, data splitting and per-cell model assessment.

mod split;
mod stats;

use rayon::prelude::*;

use crate::media::FeatureTable;
use crate::models::{predict, random_search, FeatureVector, ModelError, ModelSpec, TrainedModel};
use crate::seed::derive_seed;

pub use split::{group_by_content, make_folds, split_train_test, CvKind, CvScheme, Fold};
pub use stats::{average_ranks, pcc, rmse, srocc};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("{0} input is constant; correlation undefined")]
    Constant(&'static str),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("split ratio {0} outside (0, 1)")]
    Ratio(f64),
    #[error("cannot make {k} folds from {n} rows")]
    FoldCount { k: usize, n: usize },
    #[error("leave-one-content-out needs at least two contents")]
    SingleContent,
    #[error("unknown CV scheme `{0}`")]
    UnknownScheme(String),
    #[error("feature table has no metric column `{0}`")]
    MissingMetric(String),
    #[error(transparent)]
    Model(Box<ModelError>),
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        EvalError::Model(Box::new(e))
    }
}

/// One labelled row as seen by a single grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub content_id: String,
    pub x: FeatureVector,
    pub mos: f64,
}

/// Pairs the named audio and video columns of `table` with the MOS.
pub fn observations(
    table: &FeatureTable,
    audio: &str,
    video: &str,
) -> Result<Vec<Observation>, EvalError> {
    let a = table
        .audio_index(audio)
        .ok_or_else(|| EvalError::MissingMetric(audio.to_string()))?;
    let v = table
        .video_index(video)
        .ok_or_else(|| EvalError::MissingMetric(video.to_string()))?;
    Ok(table
        .rows
        .iter()
        .map(|r| Observation {
            content_id: r.content_id.clone(),
            x: FeatureVector::new(r.audio_scores[a], r.video_scores[v]),
            mos: r.mos_av,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub split_ratio: f64,
    /// Inner fold count used for tuning inside each leave-one-content-out fold.
    pub inner_k: usize,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            split_ratio: 0.8,
            inner_k: 10,
        }
    }
}

/// Statistics for one (audio, video, learner, CV) cell.
///
/// Correlations are `None` when undefined on every assessed fold (for
/// example a tree predicting one value for the whole test set).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub pcc: Option<f64>,
    pub srocc: Option<f64>,
    pub rmse: f64,
    pub n_test: usize,
    pub folds: usize,
    /// Folds on which a correlation was undefined.
    pub degenerate_folds: usize,
    /// Mean tuning RMSE of the selected candidates, when available.
    pub cv_rmse: Option<f64>,
}

struct FoldStats {
    pcc: Option<f64>,
    srocc: Option<f64>,
    rmse: f64,
    n_test: usize,
    cv_rmse: Option<f64>,
}

fn assess(
    model: &TrainedModel,
    rows: &[Observation],
    test: &[usize],
    cv_rmse: Option<f64>,
) -> Result<FoldStats, EvalError> {
    let predicted: Vec<f64> = test.iter().map(|&i| predict(model, &rows[i].x)).collect();
    let actual: Vec<f64> = test.iter().map(|&i| rows[i].mos).collect();
    let correlation = |f: fn(&[f64], &[f64]) -> Result<f64, EvalError>| match f(&predicted, &actual)
    {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::Constant(_)) | Err(EvalError::TooShort { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(FoldStats {
        pcc: correlation(pcc)?,
        srocc: correlation(srocc)?,
        rmse: rmse(&predicted, &actual)?,
        n_test: test.len(),
        cv_rmse,
    })
}

fn subset(rows: &[Observation], idx: &[usize]) -> Vec<Observation> {
    idx.iter().map(|&i| rows[i].clone()).collect()
}

fn tune(
    spec: &ModelSpec,
    train: &[Observation],
    k: usize,
    seed: u64,
) -> Result<(TrainedModel, Option<f64>), EvalError> {
    let inner = CvScheme::kfold(k.min(train.len()), derive_seed(seed, &["inner-folds"]));
    let spec = ModelSpec {
        seed: derive_seed(seed, &["search"]),
        ..spec.clone()
    };
    let out = random_search(&spec, train, &inner)?;
    Ok((out.model, out.cv_rmse))
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Evaluates one learner on one cell's rows.
///
/// k-fold: a stratified held-out split is reserved, the learner is tuned
/// by `scheme.k`-fold CV on the rest, and the statistics come from the
/// held-out rows. Leave-one-content-out: each content is held out in turn,
/// the learner is tuned by an inner k-fold on the remaining contents, and
/// the reported statistics are the mean over contents.
pub fn evaluate_cell(
    rows: &[Observation],
    spec: &ModelSpec,
    scheme: &CvScheme,
    settings: &EvalSettings,
    seed: u64,
) -> Result<EvalResult, EvalError> {
    let per_fold: Vec<FoldStats> = match scheme.kind {
        CvKind::KFold => {
            let (train, test) =
                split_train_test(rows, settings.split_ratio, derive_seed(seed, &["holdout"]))?;
            let train_rows = subset(rows, &train);
            let (model, cv_rmse) = tune(spec, &train_rows, scheme.k, seed)?;
            vec![assess(&model, rows, &test, cv_rmse)?]
        }
        CvKind::LeaveOneContentOut => {
            let folds = make_folds(rows, scheme)?;
            folds
                .par_iter()
                .enumerate()
                .map(|(f, fold)| {
                    let fold_seed = derive_seed(seed, &["content-fold", &f.to_string()]);
                    let (model, cv_rmse) = tune(
                        spec,
                        &subset(rows, &fold.train),
                        settings.inner_k,
                        fold_seed,
                    )?;
                    assess(&model, rows, &fold.validation, cv_rmse)
                })
                .collect::<Result<_, _>>()?
        }
    };
    let folds = per_fold.len();
    let degenerate_folds = per_fold
        .iter()
        .filter(|s| s.pcc.is_none() || s.srocc.is_none())
        .count();
    if degenerate_folds > 0 {
        log::warn!("{degenerate_folds} of {folds} folds had undefined correlations");
    }
    Ok(EvalResult {
        pcc: mean_defined(per_fold.iter().map(|s| s.pcc)),
        srocc: mean_defined(per_fold.iter().map(|s| s.srocc)),
        rmse: per_fold.iter().map(|s| s.rmse).sum::<f64>() / folds as f64,
        n_test: per_fold.iter().map(|s| s.n_test).sum(),
        folds,
        degenerate_folds,
        cv_rmse: mean_defined(per_fold.iter().map(|s| s.cv_rmse)),
    })
}
