//! Train/test splitting and cross-validation folds.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EvalError, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CvKind {
    KFold,
    LeaveOneContentOut,
}

impl CvKind {
    pub const ALL: [CvKind; 2] = [CvKind::KFold, CvKind::LeaveOneContentOut];

    pub fn name(self) -> &'static str {
        match self {
            CvKind::KFold => "kfold",
            CvKind::LeaveOneContentOut => "loco",
        }
    }
}

impl std::fmt::Display for CvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CvKind {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kfold" | "k-fold" => Ok(CvKind::KFold),
            "loco" | "leave_one_content_out" | "loocv" => Ok(CvKind::LeaveOneContentOut),
            other => Err(EvalError::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvScheme {
    pub kind: CvKind,
    /// Fold count; ignored for leave-one-content-out.
    pub k: usize,
    pub seed: u64,
}

impl CvScheme {
    pub fn kfold(k: usize, seed: u64) -> Self {
        Self {
            kind: CvKind::KFold,
            k,
            seed,
        }
    }

    pub fn leave_one_content_out() -> Self {
        Self {
            kind: CvKind::LeaveOneContentOut,
            k: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Distinct content ids in order of first appearance, with their row indices.
pub fn group_by_content(rows: &[Observation]) -> Vec<(&str, Vec<usize>)> {
    let mut groups: Vec<(&str, Vec<usize>)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        match groups.iter_mut().find(|(c, _)| *c == r.content_id) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((&r.content_id, vec![i])),
        }
    }
    groups
}

/// `⌈ratio·n⌉`, tolerant of the representation error in products like
/// `0.8 · 40`.
fn train_count(ratio: f64, n: usize) -> usize {
    ((ratio * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Seeded train/test split, returned as sorted index lists.
///
/// When every content has at least two rows the split is stratified: each
/// content gets `⌊ratio·n_c⌋` training rows, and the rows still needed to
/// reach `⌈ratio·n⌉` go to the contents with the largest fractional share
/// (seeded order among equals).
pub fn split_train_test(
    rows: &[Observation],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if rows.len() < 5 {
        return Err(EvalError::TooFewRows {
            needed: 5,
            got: rows.len(),
        });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(EvalError::Ratio(ratio));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rows.len();
    let target = train_count(ratio, n);
    let mut groups = group_by_content(rows);
    let mut train = Vec::with_capacity(target);
    let mut test = Vec::with_capacity(n - target);

    if groups.iter().all(|(_, idx)| idx.len() >= 2) {
        for (_, idx) in groups.iter_mut() {
            idx.shuffle(&mut rng);
        }
        let mut alloc: Vec<usize> = groups
            .iter()
            .map(|(_, idx)| (ratio * idx.len() as f64 + 1e-9).floor() as usize)
            .collect();
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.shuffle(&mut rng);
        let frac = |g: usize| ratio * groups[g].1.len() as f64 - alloc[g] as f64;
        order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)));
        let mut missing = target.saturating_sub(alloc.iter().sum());
        'fill: while missing > 0 {
            let before = missing;
            for &g in &order {
                if missing == 0 {
                    break 'fill;
                }
                if alloc[g] < groups[g].1.len() {
                    alloc[g] += 1;
                    missing -= 1;
                }
            }
            if missing == before {
                break;
            }
        }
        for ((_, idx), a) in groups.iter().zip(&alloc) {
            train.extend_from_slice(&idx[..*a]);
            test.extend_from_slice(&idx[*a..]);
        }
    } else {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        train.extend_from_slice(&perm[..target]);
        test.extend_from_slice(&perm[target..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn make_folds(rows: &[Observation], scheme: &CvScheme) -> Result<Vec<Fold>, EvalError> {
    let n = rows.len();
    let groups: Vec<Vec<usize>> = match scheme.kind {
        CvKind::KFold => {
            if scheme.k < 2 || scheme.k > n {
                return Err(EvalError::FoldCount { k: scheme.k, n });
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(scheme.seed));
            let base = n / scheme.k;
            let extra = n % scheme.k;
            let mut at = 0;
            (0..scheme.k)
                .map(|f| {
                    let size = base + usize::from(f < extra);
                    let mut v = perm[at..at + size].to_vec();
                    at += size;
                    v.sort_unstable();
                    v
                })
                .collect()
        }
        CvKind::LeaveOneContentOut => {
            let g = group_by_content(rows);
            if g.len() < 2 {
                return Err(EvalError::SingleContent);
            }
            g.into_iter().map(|(_, idx)| idx).collect()
        }
    };
    Ok(groups
        .into_iter()
        .map(|validation| {
            let mut in_fold = vec![false; n];
            for &i in &validation {
                in_fold[i] = true;
            }
            Fold {
                train: (0..n).filter(|&i| !in_fold[i]).collect(),
                validation,
            }
        })
        .collect())
}
