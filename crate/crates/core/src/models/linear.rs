//! Least-squares fit of `MOS = α + β·q_a + γ·q_v + ζ·q_a·q_v`.

use nalgebra::{DMatrix, DVector};

use super::{FeatureMode, FeatureVector, ModelError};

/// Smallest-to-largest singular value ratio below which the design is
/// treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

const COLUMN_NAMES: [&str; 4] = ["intercept", "q_a", "q_v", "q_a*q_v"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAVModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Zero in [`FeatureMode::Pair`].
    pub zeta: f64,
}

impl LinearAVModel {
    pub fn predict(&self, x: &FeatureVector) -> f64 {
        self.alpha + self.beta * x.q_a + self.gamma * x.q_v + self.zeta * x.interaction()
    }
}

fn design_row(x: &FeatureVector, mode: FeatureMode) -> Vec<f64> {
    match mode {
        FeatureMode::Interaction => vec![1.0, x.q_a, x.q_v, x.interaction()],
        FeatureMode::Pair => vec![1.0, x.q_a, x.q_v],
    }
}

fn condition_ratio(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0.0;
    }
    sv.min() / max
}

pub fn fit_linear(
    features: &[FeatureVector],
    targets: &[f64],
    mode: FeatureMode,
) -> Result<LinearAVModel, ModelError> {
    let cols = mode.dimension() + 1;
    if features.len() < cols || features.len() != targets.len() {
        return Err(ModelError::TooFewRows {
            needed: cols,
            got: features.len(),
        });
    }
    let n = features.len();
    let rows: Vec<f64> = features.iter().flat_map(|f| design_row(f, mode)).collect();
    let design = DMatrix::from_row_slice(n, cols, &rows);

    // Add columns one at a time so the first dependent one can be named.
    for k in 1..=cols {
        if condition_ratio(&design.columns(0, k).into_owned()) < RANK_TOLERANCE {
            return Err(ModelError::RankDeficient {
                column: COLUMN_NAMES[k - 1].to_string(),
            });
        }
    }

    let y = DVector::from_column_slice(targets);
    let svd = design.svd(true, true);
    let coef = svd
        .solve(&y, 0.0)
        .map_err(|e| ModelError::Numerical(e.to_string()))?;
    let model = LinearAVModel {
        alpha: coef[0],
        beta: coef[1],
        gamma: coef[2],
        zeta: if cols == 4 { coef[3] } else { 0.0 },
    };
    if ![model.alpha, model.beta, model.gamma, model.zeta]
        .iter()
        .all(|c| c.is_finite())
    {
        return Err(ModelError::Numerical("non-finite coefficient".into()));
    }
    Ok(model)
}
