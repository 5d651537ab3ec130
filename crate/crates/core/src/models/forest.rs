//! Random forest regression: bootstrap-resampled trees with `mtry` random
//! candidate features per split, averaged.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{grow, RegressionTree, TreeParams};
use super::{ModelError, Samples};

pub const DEFAULT_NTREE: usize = 500;
/// Nodes smaller than this are not split, as in the usual regression forest.
pub const DEFAULT_NODE_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ForestParams {
    pub ntree: usize,
    pub mtry: usize,
    pub min_split: usize,
    pub max_depth: usize,
    /// Disabling the bootstrap trains every tree on the full sample.
    pub bootstrap: bool,
}

impl ForestParams {
    pub fn new(ntree: usize, mtry: usize) -> Self {
        Self {
            ntree,
            mtry,
            min_split: DEFAULT_NODE_SIZE,
            max_depth: usize::MAX,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
    pub mtry: usize,
    pub seed: u64,
    /// Range of the training targets; predictions never leave it.
    pub target_range: (f64, f64),
}

impl ForestModel {
    pub fn ntree(&self) -> usize {
        self.trees.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        (sum / self.trees.len() as f64).clamp(self.target_range.0, self.target_range.1)
    }
}

pub fn fit_forest(
    samples: &Samples,
    params: ForestParams,
    seed: u64,
) -> Result<ForestModel, ModelError> {
    let dim = samples.dimension();
    if samples.len() < 2 {
        return Err(ModelError::TooFewRows {
            needed: 2,
            got: samples.len(),
        });
    }
    if params.mtry == 0 || params.mtry > dim {
        return Err(ModelError::Hyperparameter(format!(
            "mtry {} outside 1..={dim}",
            params.mtry
        )));
    }
    if params.ntree == 0 {
        return Err(ModelError::Hyperparameter("ntree must be positive".into()));
    }
    let tree_params = TreeParams {
        min_split: params.min_split,
        max_depth: params.max_depth,
    };
    let n = samples.len();
    let trees: Vec<RegressionTree> = (0..params.ntree)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut choose = |d: usize| -> Vec<usize> {
                if params.mtry >= d {
                    return (0..d).collect();
                }
                let mut picked = sample(&mut rng, d, params.mtry).into_vec();
                picked.sort_unstable();
                picked
            };
            grow(samples, rows, tree_params, &mut choose)
        })
        .collect();
    let lo = samples.y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ForestModel {
        trees,
        mtry: params.mtry,
        seed,
        target_range: (lo, hi),
    })
}
