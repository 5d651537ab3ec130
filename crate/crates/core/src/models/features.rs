use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// One (audio score, video score) observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub q_a: f64,
    pub q_v: f64,
}

impl FeatureVector {
    pub fn new(q_a: f64, q_v: f64) -> Self {
        Self { q_a, q_v }
    }

    #[inline]
    pub fn interaction(&self) -> f64 {
        self.q_a * self.q_v
    }
}

/// Which inputs the learners see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FeatureMode {
    /// `(q_a, q_v, q_a·q_v)`
    #[default]
    Interaction,
    /// `(q_a, q_v)`
    Pair,
}

impl FeatureMode {
    pub fn dimension(self) -> usize {
        match self {
            FeatureMode::Interaction => 3,
            FeatureMode::Pair => 2,
        }
    }

    pub fn expand(self, x: &FeatureVector) -> Vec<f64> {
        match self {
            FeatureMode::Interaction => vec![x.q_a, x.q_v, x.interaction()],
            FeatureMode::Pair => vec![x.q_a, x.q_v],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Interaction => "interaction",
            FeatureMode::Pair => "pair",
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureMode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "interaction" => Ok(FeatureMode::Interaction),
            "pair" => Ok(FeatureMode::Pair),
            other => Err(ModelError::Parse(format!("unknown feature mode `{other}`"))),
        }
    }
}

/// Row-major feature matrix with targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), y.len());
        Self { x, y }
    }

    pub fn from_features(features: &[FeatureVector], targets: &[f64], mode: FeatureMode) -> Self {
        Self {
            x: features.iter().map(|f| mode.expand(f)).collect(),
            y: targets.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }
}
