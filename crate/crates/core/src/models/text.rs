//! Line-oriented text format for trained models.
//!
//! Every line is a keyword followed by space-separated fields. Reals are
//! written in Rust's shortest round-trip form, so a reload predicts bit for
//! bit the same values. Lines starting with `#` and blank lines are ignored.
//!
//! ```text
//! sphereqa-model 1
//! kind <LM|DT|RF|SVM>
//! features <interaction|pair>
//! <learner body>
//! end
//! ```
//!
//! Learner bodies:
//!
//! ```text
//! LM   coef <alpha> <beta> <gamma> <zeta>
//!
//! DT   params <min_split> <max_depth>
//!      tree <node_count> <depth>
//!      <node_count node lines>
//!
//! RF   params <mtry>
//!      forest <ntree> <seed> <target_min> <target_max>
//!      <ntree tree blocks, each a `tree` line plus its node lines>
//!
//! SVM  params <c> <sigma>
//!      svr <epsilon> <bias> <iterations> <kkt_violation> <n_support> <dim>
//!      scale_mean <dim reals>
//!      scale_std <dim reals>
//!      <n_support lines: sv <coefficient> <dim standardized reals>>
//! ```
//!
//! Node lines are `L <value> <n>` for leaves and
//! `S <feature> <threshold> <left> <right> <n>` for splits, listed in arena
//! order (node 0 is the root).

use std::fmt::Write as _;
use std::str::FromStr;

use super::{
    FeatureMode, FeatureScaler, ForestModel, Hyperparams, Learner, LearnerKind, LinearAVModel,
    ModelError, Node, RegressionTree, SvrModel, TrainedModel, TreeParams,
};

const MAGIC: &str = "sphereqa-model";
const VERSION: u32 = 1;

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_tree(out: &mut String, t: &RegressionTree) {
    let _ = writeln!(out, "tree {} {}", t.nodes.len(), t.depth);
    for n in &t.nodes {
        let _ = match n {
            Node::Leaf { value, n } => writeln!(out, "L {value} {n}"),
            Node::Split {
                feature,
                threshold,
                left,
                right,
                n,
            } => writeln!(out, "S {feature} {threshold} {left} {right} {n}"),
        };
    }
}

pub fn write_model(model: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "kind {}", model.kind());
    let _ = writeln!(out, "features {}", model.feature_mode);
    match (&model.learner, model.hyperparams) {
        (Learner::Linear(m), _) => {
            let _ = writeln!(out, "coef {}", join(&[m.alpha, m.beta, m.gamma, m.zeta]));
        }
        (Learner::Tree(t), hyper) => {
            let p = match hyper {
                Hyperparams::Tree(p) => p,
                _ => TreeParams::default(),
            };
            let _ = writeln!(out, "params {} {}", p.min_split, p.max_depth);
            write_tree(&mut out, t);
        }
        (Learner::Forest(f), _) => {
            let _ = writeln!(out, "params {}", f.mtry);
            let _ = writeln!(
                out,
                "forest {} {} {} {}",
                f.trees.len(),
                f.seed,
                f.target_range.0,
                f.target_range.1
            );
            for t in &f.trees {
                write_tree(&mut out, t);
            }
        }
        (Learner::Svr(s), _) => {
            let dim = s.feature_scaler.mean.len();
            let _ = writeln!(out, "params {} {}", s.c, s.sigma);
            let _ = writeln!(
                out,
                "svr {} {} {} {} {} {dim}",
                s.epsilon,
                s.bias,
                s.iterations,
                s.kkt_violation,
                s.support_coefficients.len()
            );
            let _ = writeln!(out, "scale_mean {}", join(&s.feature_scaler.mean));
            let _ = writeln!(out, "scale_std {}", join(&s.feature_scaler.std));
            for (a, v) in s.support_coefficients.iter().zip(&s.support_vectors) {
                let _ = writeln!(out, "sv {a} {}", join(v));
            }
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self {
            inner: it.peekable(),
        }
    }

    /// Next line, which must begin with `keyword`; returns its fields.
    fn expect(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>), ModelError> {
        let (line, text) = self.inner.next().ok_or_else(|| {
            ModelError::Parse(format!("unexpected end of input, wanted `{keyword}`"))
        })?;
        let mut parts = text.split_whitespace();
        let head = parts.next().unwrap_or("");
        if head != keyword {
            return Err(ModelError::Parse(format!(
                "line {line}: expected `{keyword}`, found `{head}`"
            )));
        }
        Ok((line, parts.collect()))
    }

    fn next_any(&mut self) -> Result<(usize, &'a str, Vec<&'a str>), ModelError> {
        let (line, text) = self
            .inner
            .next()
            .ok_or_else(|| ModelError::Parse("unexpected end of input".into()))?;
        let mut parts = text.split_whitespace();
        let head = parts.next().unwrap_or("");
        Ok((line, head, parts.collect()))
    }
}

fn field<T: FromStr>(line: usize, fields: &[&str], i: usize) -> Result<T, ModelError> {
    let raw = fields
        .get(i)
        .ok_or_else(|| ModelError::Parse(format!("line {line}: missing field {}", i + 1)))?;
    raw.parse()
        .map_err(|_| ModelError::Parse(format!("line {line}: cannot parse `{raw}`")))
}

fn exact_len(line: usize, fields: &[&str], n: usize) -> Result<(), ModelError> {
    if fields.len() != n {
        return Err(ModelError::Parse(format!(
            "line {line}: expected {n} fields, found {}",
            fields.len()
        )));
    }
    Ok(())
}

fn reals(line: usize, fields: &[&str]) -> Result<Vec<f64>, ModelError> {
    (0..fields.len()).map(|i| field(line, fields, i)).collect()
}

fn read_tree(lines: &mut Lines<'_>, dim: usize) -> Result<RegressionTree, ModelError> {
    let (line, f) = lines.expect("tree")?;
    exact_len(line, &f, 2)?;
    let count: usize = field(line, &f, 0)?;
    let depth: usize = field(line, &f, 1)?;
    if count == 0 {
        return Err(ModelError::Parse(format!("line {line}: empty tree")));
    }
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, head, f) = lines.next_any()?;
        let node = match head {
            "L" => {
                exact_len(line, &f, 2)?;
                Node::Leaf {
                    value: field(line, &f, 0)?,
                    n: field(line, &f, 1)?,
                }
            }
            "S" => {
                exact_len(line, &f, 5)?;
                let feature: usize = field(line, &f, 0)?;
                let left: usize = field(line, &f, 2)?;
                let right: usize = field(line, &f, 3)?;
                if feature >= dim
                    || left >= count
                    || right >= count
                    || left <= nodes.len()
                    || right <= nodes.len()
                {
                    return Err(ModelError::Parse(format!(
                        "line {line}: split indices out of range"
                    )));
                }
                Node::Split {
                    feature,
                    threshold: field(line, &f, 1)?,
                    left,
                    right,
                    n: field(line, &f, 4)?,
                }
            }
            other => {
                return Err(ModelError::Parse(format!(
                    "line {line}: unknown node kind `{other}`"
                )))
            }
        };
        nodes.push(node);
    }
    Ok(RegressionTree { nodes, depth })
}

pub fn read_model(text: &str) -> Result<TrainedModel, ModelError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.expect(MAGIC)?;
    let version: u32 = field(line, &f, 0)?;
    if version != VERSION {
        return Err(ModelError::Parse(format!(
            "unsupported format version {version}"
        )));
    }
    let (line, f) = lines.expect("kind")?;
    exact_len(line, &f, 1)?;
    let kind: LearnerKind = f[0].parse()?;
    let (line, f) = lines.expect("features")?;
    exact_len(line, &f, 1)?;
    let feature_mode: FeatureMode = f[0].parse()?;
    let dim = feature_mode.dimension();

    let (hyperparams, learner) = match kind {
        LearnerKind::Lm => {
            let (line, f) = lines.expect("coef")?;
            exact_len(line, &f, 4)?;
            let c = reals(line, &f)?;
            let m = LinearAVModel {
                alpha: c[0],
                beta: c[1],
                gamma: c[2],
                zeta: c[3],
            };
            (Hyperparams::Linear, Learner::Linear(m))
        }
        LearnerKind::Dt => {
            let (line, f) = lines.expect("params")?;
            exact_len(line, &f, 2)?;
            let p = TreeParams {
                min_split: field(line, &f, 0)?,
                max_depth: field(line, &f, 1)?,
            };
            (
                Hyperparams::Tree(p),
                Learner::Tree(read_tree(&mut lines, dim)?),
            )
        }
        LearnerKind::Rf => {
            let (line, f) = lines.expect("params")?;
            exact_len(line, &f, 1)?;
            let mtry: usize = field(line, &f, 0)?;
            let (line, f) = lines.expect("forest")?;
            exact_len(line, &f, 4)?;
            let ntree: usize = field(line, &f, 0)?;
            let seed: u64 = field(line, &f, 1)?;
            let target_range = (field(line, &f, 2)?, field(line, &f, 3)?);
            if ntree == 0 {
                return Err(ModelError::Parse(format!(
                    "line {line}: forest without trees"
                )));
            }
            let trees = (0..ntree)
                .map(|_| read_tree(&mut lines, dim))
                .collect::<Result<_, _>>()?;
            (
                Hyperparams::Forest { mtry },
                Learner::Forest(ForestModel {
                    trees,
                    mtry,
                    seed,
                    target_range,
                }),
            )
        }
        LearnerKind::Svm => {
            let (line, f) = lines.expect("params")?;
            exact_len(line, &f, 2)?;
            let c: f64 = field(line, &f, 0)?;
            let sigma: f64 = field(line, &f, 1)?;
            let (line, f) = lines.expect("svr")?;
            exact_len(line, &f, 6)?;
            let epsilon: f64 = field(line, &f, 0)?;
            let bias: f64 = field(line, &f, 1)?;
            let iterations: usize = field(line, &f, 2)?;
            let kkt_violation: f64 = field(line, &f, 3)?;
            let n_support: usize = field(line, &f, 4)?;
            let stored_dim: usize = field(line, &f, 5)?;
            if stored_dim != dim {
                return Err(ModelError::Parse(format!(
                    "line {line}: dimension {stored_dim} does not match feature mode {feature_mode}"
                )));
            }
            let (line, f) = lines.expect("scale_mean")?;
            exact_len(line, &f, dim)?;
            let mean = reals(line, &f)?;
            let (line, f) = lines.expect("scale_std")?;
            exact_len(line, &f, dim)?;
            let std = reals(line, &f)?;
            let mut support_coefficients = Vec::with_capacity(n_support);
            let mut support_vectors = Vec::with_capacity(n_support);
            for _ in 0..n_support {
                let (line, f) = lines.expect("sv")?;
                exact_len(line, &f, dim + 1)?;
                let v = reals(line, &f)?;
                support_coefficients.push(v[0]);
                support_vectors.push(v[1..].to_vec());
            }
            (
                Hyperparams::Svm { c, sigma },
                Learner::Svr(SvrModel {
                    support_coefficients,
                    support_vectors,
                    bias,
                    sigma,
                    c,
                    epsilon,
                    feature_scaler: FeatureScaler { mean, std },
                    kkt_violation,
                    iterations,
                }),
            )
        }
    };
    lines.expect("end")?;
    if let Some((line, _)) = lines.inner.next() {
        return Err(ModelError::Parse(format!(
            "line {line}: content after `end`"
        )));
    }
    Ok(TrainedModel {
        feature_mode,
        hyperparams,
        learner,
    })
}
