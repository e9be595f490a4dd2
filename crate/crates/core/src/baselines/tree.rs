//! CART trees: Gini classification trees and squared-error regression trees.

use ndarray::{Array2, ArrayView1};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Samples go left when `x[feature] <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    /// Class probabilities for classification trees, a single value for
    /// regression trees.
    Leaf { value: Vec<f64> },
}

impl TreeNode {
    pub fn leaf_value(&self, x: ArrayView1<f64>) -> &[f64] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 12,
            min_leaf: 1,
        }
    }
}

/// Gini impurity `1 - Σ p²` of a class-count vector.
pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn side_score(counts: &[usize], n: usize) -> f64 {
    let sumsq: u64 = counts.iter().map(|&c| (c as u64) * (c as u64)).sum();
    n as f64 - sumsq as f64 / n as f64
}

/// Size-weighted Gini of a candidate split, `n_l·gini_l + n_r·gini_r`.
pub fn split_score(left: &[usize], right: &[usize]) -> f64 {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    side_score(left, nl) + side_score(right, nr)
}

/// `split_score` as an exact fraction `(numerator, denominator)`, used to
/// compare candidates without rounding.
fn split_score_exact(left: &[usize], right: &[usize]) -> (u128, u128) {
    let side = |c: &[usize]| -> (u128, u128) {
        let n: u128 = c.iter().map(|&v| v as u128).sum();
        (n, c.iter().map(|&v| (v as u128) * (v as u128)).sum())
    };
    let (nl, sl) = side(left);
    let (nr, sr) = side(right);
    (nl * nr * (nl + nr) - nr * sl - nl * sr, nl * nr)
}

/// Midpoint of two distinct sorted values that still separates them.
pub fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b { m } else { a }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSplit {
    pub feature: usize,
    pub threshold: f64,
    pub score: f64,
}

fn sorted_by_feature(x: &Array2<f64>, rows: &[usize], f: usize) -> Vec<usize> {
    let mut order = rows.to_vec();
    order.sort_by(|&a, &b| x[[a, f]].total_cmp(&x[[b, f]]).then(a.cmp(&b)));
    order
}

/// Lowest-score Gini split over `features` (scanned in the given order,
/// thresholds ascending); the first minimum wins ties.
pub fn best_gini_split(
    x: &Array2<f64>,
    labels: &[usize],
    n_classes: usize,
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<BestSplit> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let mut total = vec![0usize; n_classes];
    for &r in rows {
        total[labels[r]] += 1;
    }
    let mut best: Option<BestSplit> = None;
    let mut best_exact = (0u128, 1u128);
    for &f in features {
        let order = sorted_by_feature(x, rows, f);
        let mut left = vec![0usize; n_classes];
        let mut right = total.clone();
        for i in 0..n - 1 {
            let c = labels[order[i]];
            left[c] += 1;
            right[c] -= 1;
            let (a, b) = (x[[order[i], f]], x[[order[i + 1], f]]);
            if a == b || i + 1 < min_leaf || n - i - 1 < min_leaf {
                continue;
            }
            let exact = split_score_exact(&left, &right);
            if best.is_none() || exact.0 * best_exact.1 < best_exact.0 * exact.1 {
                best_exact = exact;
                best = Some(BestSplit {
                    feature: f,
                    threshold: midpoint(a, b),
                    score: split_score(&left, &right),
                });
            }
        }
    }
    best
}

/// Lowest squared-error split for real targets.
fn best_sse_split(
    x: &Array2<f64>,
    y: &[f64],
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<BestSplit> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let total: f64 = rows.iter().map(|&r| y[r]).sum();
    let mut best: Option<BestSplit> = None;
    for &f in features {
        let order = sorted_by_feature(x, rows, f);
        let mut sl = 0.0;
        for i in 0..n - 1 {
            sl += y[order[i]];
            let (a, b) = (x[[order[i], f]], x[[order[i + 1], f]]);
            if a == b || i + 1 < min_leaf || n - i - 1 < min_leaf {
                continue;
            }
            let (nl, nr) = ((i + 1) as f64, (n - i - 1) as f64);
            let sr = total - sl;
            // Σy² is constant, so minimising SSE maximises this gain.
            let score = -(sl * sl / nl + sr * sr / nr);
            if best.is_none_or(|bs| score < bs.score) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: midpoint(a, b),
                    score,
                });
            }
        }
    }
    best
}

/// Per-split feature subsampling used by random forests.
pub(crate) struct FeatureSampler<'a> {
    pub k: usize,
    pub rng: &'a mut Rng,
}

impl FeatureSampler<'_> {
    fn draw(&mut self, n_features: usize) -> Vec<usize> {
        let mut f = sample(self.rng, n_features, self.k.min(n_features)).into_vec();
        f.sort_unstable();
        f
    }
}

pub(crate) fn grow_classifier(
    x: &Array2<f64>,
    labels: &[usize],
    n_classes: usize,
    rows: &[usize],
    cfg: &TreeConfig,
    depth: usize,
    sampler: &mut Option<FeatureSampler<'_>>,
) -> TreeNode {
    let mut counts = vec![0usize; n_classes];
    for &r in rows {
        counts[labels[r]] += 1;
    }
    let leaf = || TreeNode::Leaf {
        value: counts.iter().map(|&c| c as f64 / rows.len() as f64).collect(),
    };
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || depth >= cfg.max_depth || rows.len() < 2 * cfg.min_leaf.max(1) {
        return leaf();
    }
    let features: Vec<usize> = match sampler {
        Some(s) => s.draw(x.ncols()),
        None => (0..x.ncols()).collect(),
    };
    let Some(split) = best_gini_split(x, labels, n_classes, rows, &features, cfg.min_leaf.max(1)) else {
        return leaf();
    };
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, split.feature]] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow_classifier(x, labels, n_classes, &l, cfg, depth + 1, sampler)),
        right: Box::new(grow_classifier(x, labels, n_classes, &r, cfg, depth + 1, sampler)),
    }
}

/// Regression tree whose leaves hold the mean target.
pub(crate) fn grow_regressor(
    x: &Array2<f64>,
    y: &[f64],
    rows: &[usize],
    cfg: &TreeConfig,
    depth: usize,
) -> TreeNode {
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
    let constant = rows.iter().all(|&r| y[r] == y[rows[0]]);
    if constant || depth >= cfg.max_depth || rows.len() < 2 * cfg.min_leaf.max(1) {
        return TreeNode::Leaf { value: vec![mean] };
    }
    let features: Vec<usize> = (0..x.ncols()).collect();
    let Some(split) = best_sse_split(x, y, rows, &features, cfg.min_leaf.max(1)) else {
        return TreeNode::Leaf { value: vec![mean] };
    };
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, split.feature]] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow_regressor(x, y, &l, cfg, depth + 1)),
        right: Box::new(grow_regressor(x, y, &r, cfg, depth + 1)),
    }
}

/// CART classification tree with Gini impurity.
pub fn fit_tree(ds: &Dataset, cfg: &TreeConfig) -> Result<TreeNode> {
    if ds.n_examples() == 0 {
        return Err(Error::EmptyDataset("cannot fit a tree on zero examples".into()));
    }
    if ds.n_examples() < cfg.min_leaf {
        return Err(Error::Data(format!(
            "{} examples is fewer than min_leaf {}",
            ds.n_examples(),
            cfg.min_leaf
        )));
    }
    let rows: Vec<usize> = (0..ds.n_examples()).collect();
    Ok(grow_classifier(&ds.features, &ds.labels, ds.n_classes(), &rows, cfg, 0, &mut None))
}

pub fn predict_tree(tree: &TreeNode, x: ArrayView1<f64>) -> Vec<f64> {
    tree.leaf_value(x).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn ds(x: Array2<f64>, labels: Vec<usize>, n_classes: usize) -> Dataset {
        let names = (0..x.ncols()).map(|i| format!("f{i}")).collect();
        let classes = (0..n_classes).map(|c| format!("C{c}")).collect();
        Dataset::new(x, labels, classes, names).unwrap()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[5, 0, 0]), 0.0);
        assert!((gini(&[4, 4, 4]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pure_dataset_is_single_leaf() {
        let t = fit_tree(&ds(array![[1.0], [2.0], [3.0]], vec![1, 1, 1], 2), &TreeConfig::default()).unwrap();
        assert_eq!(t, TreeNode::Leaf { value: vec![0.0, 1.0] });
    }

    #[test]
    fn hand_derived_root_split() {
        let d = ds(array![[0.0], [1.0], [2.0], [3.0]], vec![0, 0, 1, 1], 2);
        let t = fit_tree(&d, &TreeConfig::default()).unwrap();
        match &t {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 1.5);
            }
            _ => panic!("expected split"),
        }
        for (row, &y) in d.features.rows().into_iter().zip(&d.labels) {
            let p = predict_tree(&t, row);
            assert_eq!(p[y], 1.0);
        }
    }

    #[test]
    fn depth_limit_and_empty() {
        let x = Array2::from_shape_fn((16, 1), |(i, _)| i as f64);
        let labels = (0..16).map(|i| i % 2).collect();
        let t = fit_tree(&ds(x, labels, 2), &TreeConfig { max_depth: 3, min_leaf: 1 }).unwrap();
        assert!(t.depth() <= 3);
        let empty = Dataset::new(Array2::zeros((0, 1)), vec![], vec!["A".into()], vec!["f".into()]).unwrap();
        assert!(fit_tree(&empty, &TreeConfig::default()).is_err());
    }

    #[test]
    fn midpoint_separates_adjacent_floats() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(a <= m && m < b);
    }

    #[test]
    fn regression_tree_leaf_means() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [1.0, 1.0, 5.0, 5.0];
        let t = grow_regressor(&x, &y, &[0, 1, 2, 3], &TreeConfig { max_depth: 2, min_leaf: 1 }, 0);
        assert_eq!(t.leaf_value(x.row(0)), [1.0]);
        assert_eq!(t.leaf_value(x.row(3)), [5.0]);
    }
}
