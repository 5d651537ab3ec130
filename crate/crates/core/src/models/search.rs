//! Random hyperparameter search scored by cross-validated RMSE.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    fit_model, predict, FeatureVector, Hyperparams, LearnerKind, ModelError, ModelSpec,
    TrainedModel, TreeParams,
};
use crate::eval::{make_folds, rmse, CvScheme, Fold, Observation};
use crate::seed::derive_seed;

/// Sampling boxes for each tuned learner. Integer ranges are inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpace {
    pub dt_min_split: (usize, usize),
    pub dt_max_depth: (usize, usize),
    pub svm_log2_c: (f64, f64),
    pub svm_log2_sigma: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            dt_min_split: (2, 20),
            dt_max_depth: (1, 30),
            svm_log2_c: (-5.0, 15.0),
            svm_log2_sigma: (-15.0, 3.0),
        }
    }
}

impl SearchSpace {
    /// Draws one candidate; `dim` is the number of model inputs.
    pub fn draw(&self, kind: LearnerKind, dim: usize, rng: &mut impl Rng) -> Hyperparams {
        match kind {
            LearnerKind::Lm => Hyperparams::Linear,
            LearnerKind::Dt => Hyperparams::Tree(TreeParams {
                min_split: rng.random_range(self.dt_min_split.0..=self.dt_min_split.1),
                max_depth: rng.random_range(self.dt_max_depth.0..=self.dt_max_depth.1),
            }),
            LearnerKind::Rf => Hyperparams::Forest {
                mtry: rng.random_range(1..=dim),
            },
            LearnerKind::Svm => {
                let log_c = rng.random_range(self.svm_log2_c.0..=self.svm_log2_c.1);
                let log_s = rng.random_range(self.svm_log2_sigma.0..=self.svm_log2_sigma.1);
                Hyperparams::Svm {
                    c: log_c.exp2(),
                    sigma: log_s.exp2(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub hyperparams: Hyperparams,
    /// `None` when fitting failed on some fold.
    pub cv_rmse: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub model: TrainedModel,
    pub best: Hyperparams,
    /// Mean validation RMSE of the winner, when it could be scored.
    pub cv_rmse: Option<f64>,
    pub candidates_drawn: usize,
    /// Distinct candidates, in first-drawn order.
    pub candidates: Vec<CandidateScore>,
}

impl SearchOutcome {
    pub fn candidates_evaluated(&self) -> usize {
        self.candidates.len()
    }
}

fn cv_score(
    spec: &ModelSpec,
    hyper: Hyperparams,
    candidate: usize,
    x: &[FeatureVector],
    y: &[f64],
    folds: &[Fold],
) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for (f, fold) in folds.iter().enumerate() {
        let tx: Vec<FeatureVector> = fold.train.iter().map(|&i| x[i]).collect();
        let ty: Vec<f64> = fold.train.iter().map(|&i| y[i]).collect();
        let seed = derive_seed(
            spec.seed,
            &["candidate", &candidate.to_string(), "fold", &f.to_string()],
        );
        let model = fit_model(hyper, &spec.fixed, spec.feature_mode, &tx, &ty, seed)?;
        let pred: Vec<f64> = fold
            .validation
            .iter()
            .map(|&i| predict(&model, &x[i]))
            .collect();
        let actual: Vec<f64> = fold.validation.iter().map(|&i| y[i]).collect();
        total += rmse(&pred, &actual).map_err(|e| ModelError::Eval(Box::new(e)))?;
    }
    Ok(total / folds.len() as f64)
}

/// Draws `spec.tune_length` candidates, scores each distinct one by mean
/// RMSE over the folds of `cv`, and refits the best on all of `rows`.
/// The earliest drawn candidate wins ties.
pub fn random_search(
    spec: &ModelSpec,
    rows: &[Observation],
    cv: &CvScheme,
) -> Result<SearchOutcome, ModelError> {
    if spec.tune_length == 0 {
        return Err(ModelError::Hyperparameter(
            "tune_length must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &["search"]));
    let dim = spec.feature_mode.dimension();
    let mut distinct: Vec<Hyperparams> = Vec::new();
    for _ in 0..spec.tune_length {
        let h = spec.space.draw(spec.kind, dim, &mut rng);
        if !distinct.contains(&h) {
            distinct.push(h);
        }
    }

    let x: Vec<FeatureVector> = rows.iter().map(|r| r.x).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mos).collect();
    let folds = make_folds(rows, cv).map_err(|e| ModelError::Eval(Box::new(e)))?;

    let scores: Vec<Result<f64, ModelError>> = distinct
        .par_iter()
        .enumerate()
        .map(|(c, &h)| cv_score(spec, h, c, &x, &y, &folds))
        .collect();

    let mut candidates = Vec::with_capacity(distinct.len());
    let mut ranked: Vec<(usize, f64)> = Vec::new();
    for (c, (h, score)) in distinct.iter().zip(scores).enumerate() {
        let cv_rmse = match score {
            Ok(s) if s.is_finite() => Some(s),
            Ok(s) => {
                log::warn!(
                    "{} candidate {h} skipped: non-finite CV RMSE {s}",
                    spec.kind
                );
                None
            }
            Err(e) => {
                log::warn!("{} candidate {h} skipped: {e}", spec.kind);
                None
            }
        };
        if let Some(s) = cv_rmse {
            ranked.push((c, s));
        }
        candidates.push(CandidateScore {
            hyperparams: *h,
            cv_rmse,
        });
    }
    // Stable sort keeps the earliest draw first among equal scores.
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    let order: Vec<(usize, Option<f64>)> = if ranked.is_empty() {
        if distinct.len() != 1 {
            return Err(ModelError::AllCandidatesFailed(distinct.len()));
        }
        // A lone candidate is used even if it could not be scored.
        vec![(0, None)]
    } else {
        ranked.into_iter().map(|(c, s)| (c, Some(s))).collect()
    };

    // The refit on all rows can fail where every fold fit succeeded (the
    // SVR iteration cap, mostly); the next-ranked candidate takes over.
    let mut last_err = None;
    let mut chosen = None;
    for (c, cv_rmse) in order {
        let fitted = fit_model(
            distinct[c],
            &spec.fixed,
            spec.feature_mode,
            &x,
            &y,
            derive_seed(spec.seed, &["final"]),
        );
        match fitted {
            Ok(model) => {
                chosen = Some((model, distinct[c], cv_rmse));
                break;
            }
            Err(e) => {
                log::warn!("{} refit of {} failed: {e}", spec.kind, distinct[c]);
                last_err = Some(e);
            }
        }
    }
    let (model, hyper, cv_rmse) = match chosen {
        Some(found) => found,
        None => return Err(last_err.expect("at least one refit attempted")),
    };
    Ok(SearchOutcome {
        model,
        best: hyper,
        cv_rmse,
        candidates_drawn: spec.tune_length,
        candidates,
    })
}
