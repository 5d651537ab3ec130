//! CART regression trees grown greedily on squared-error reduction.

use super::Samples;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        value: f64,
        n: usize,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n: usize,
    },
}

/// A fitted tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
    pub depth: usize,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeParams {
    /// Nodes with fewer rows are not split.
    pub min_split: usize,
    /// Root is depth 0; nodes at this depth become leaves.
    pub max_depth: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            min_split: 20,
            max_depth: 30,
        }
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    reduction: f64,
}

/// Mean of `values` summed in sorted order, clamped into their range.
fn stable_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let sum: f64 = values.iter().sum();
    let lo = values[0];
    let hi = values[values.len() - 1];
    (sum / values.len() as f64).clamp(lo, hi)
}

/// Reductions closer than `sse * TIE_TOLERANCE` count as ties, which go to
/// the earlier feature and the leftmost cut. Distinct features often induce
/// the same partition and rounding must not pick between them.
const TIE_TOLERANCE: f64 = 1e-10;

fn best_split(
    samples: &Samples,
    rows: &[usize],
    features: &[usize],
    mean: f64,
    sse: f64,
) -> Option<Split> {
    let n = rows.len();
    let margin = sse * TIE_TOLERANCE;
    let mut best: Option<Split> = None;
    let mut order: Vec<usize> = rows.to_vec();
    let mut prefix = Vec::with_capacity(n);
    for &f in features {
        order.sort_by(|&a, &b| {
            samples.x[a][f]
                .total_cmp(&samples.x[b][f])
                .then(samples.y[a].total_cmp(&samples.y[b]))
        });
        prefix.clear();
        let mut acc = 0.0;
        for &r in &order {
            acc += samples.y[r] - mean;
            prefix.push(acc);
        }
        let total = acc;
        for k in 0..n - 1 {
            let lo = samples.x[order[k]][f];
            let hi = samples.x[order[k + 1]][f];
            if lo >= hi {
                continue;
            }
            let n_left = (k + 1) as f64;
            let n_right = (n - k - 1) as f64;
            let s_left = prefix[k];
            let s_right = total - s_left;
            let reduction = s_left * s_left / n_left + s_right * s_right / n_right;
            if best
                .as_ref()
                .is_none_or(|b| reduction > b.reduction + margin)
            {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(Split {
                    feature: f,
                    threshold,
                    reduction,
                });
            }
        }
    }
    best
}

/// Grows a tree; `choose_features` returns the (sorted) candidate feature
/// indices for each node.
pub(crate) fn grow(
    samples: &Samples,
    rows: Vec<usize>,
    params: TreeParams,
    choose_features: &mut dyn FnMut(usize) -> Vec<usize>,
) -> RegressionTree {
    let mut tree = RegressionTree {
        nodes: Vec::new(),
        depth: 0,
    };
    grow_node(samples, rows, 0, params, choose_features, &mut tree);
    tree
}

fn grow_node(
    samples: &Samples,
    rows: Vec<usize>,
    depth: usize,
    params: TreeParams,
    choose_features: &mut dyn FnMut(usize) -> Vec<usize>,
    tree: &mut RegressionTree,
) -> usize {
    let id = tree.nodes.len();
    tree.depth = tree.depth.max(depth);
    let n = rows.len();
    let mut targets: Vec<f64> = rows.iter().map(|&r| samples.y[r]).collect();
    let mean = stable_mean(&mut targets);
    tree.nodes.push(Node::Leaf { value: mean, n });

    if n < params.min_split.max(2) || depth >= params.max_depth {
        return id;
    }
    let sse: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    if sse <= 0.0 {
        return id;
    }
    let features = choose_features(samples.dimension());
    let Some(split) = best_split(samples, &rows, &features, mean, sse) else {
        return id;
    };
    if split.reduction <= sse * 1e-12 {
        return id;
    }
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .into_iter()
        .partition(|&r| samples.x[r][split.feature] <= split.threshold);
    let left = grow_node(samples, left_rows, depth + 1, params, choose_features, tree);
    let right = grow_node(
        samples,
        right_rows,
        depth + 1,
        params,
        choose_features,
        tree,
    );
    tree.nodes[id] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
        n,
    };
    id
}

pub fn fit_tree(samples: &Samples, params: TreeParams) -> RegressionTree {
    if samples.is_empty() {
        return RegressionTree {
            nodes: vec![Node::Leaf { value: 0.0, n: 0 }],
            depth: 0,
        };
    }
    let all: Vec<usize> = (0..samples.dimension()).collect();
    grow(samples, (0..samples.len()).collect(), params, &mut |_| {
        all.clone()
    })
}
