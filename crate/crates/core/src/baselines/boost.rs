//! Gradient boosting with one-vs-rest logistic loss and CART regression trees.

use ndarray::ArrayView1;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::tree::{grow_regressor, TreeConfig, TreeNode};
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostConfig {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// Fraction of rows each round's trees are fitted on.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            n_rounds: 100,
            max_depth: 3,
            learning_rate: 0.1,
            subsample: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    /// `trees[c]` holds the additive trees for class `c`.
    pub trees: Vec<Vec<TreeNode>>,
    pub learning_rate: f64,
    pub init_scores: Vec<f64>,
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(-y·s))` with `y ∈ {-1, 1}`, computed without overflow.
fn log_loss(s: f64, positive: bool) -> f64 {
    let m = if positive { s } else { -s };
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

impl BoostModel {
    pub fn n_classes(&self) -> usize {
        self.init_scores.len()
    }

    pub fn scores(&self, x: ArrayView1<f64>) -> Vec<f64> {
        self.trees
            .iter()
            .zip(&self.init_scores)
            .map(|(ts, s0)| s0 + ts.iter().map(|t| self.learning_rate * t.leaf_value(x)[0]).sum::<f64>())
            .collect()
    }

    /// Sum of per-class logistic losses averaged over rows.
    pub fn training_loss(&self, ds: &Dataset) -> f64 {
        let mut total = 0.0;
        for (i, &y) in ds.labels.iter().enumerate() {
            let s = self.scores(ds.features.row(i));
            total += s.iter().enumerate().map(|(c, &v)| log_loss(v, c == y)).sum::<f64>();
        }
        total / ds.n_examples() as f64
    }
}

fn boost_rounds(ds: &Dataset, cfg: &BoostConfig, mut on_round: impl FnMut(&BoostModel)) -> Result<BoostModel> {
    if ds.n_examples() == 0 {
        return Err(Error::EmptyDataset("cannot fit boosting on zero examples".into()));
    }
    if !(cfg.learning_rate > 0.0) || !(cfg.subsample > 0.0 && cfg.subsample <= 1.0) {
        return Err(Error::Config("boosting needs learning_rate > 0 and subsample in (0, 1]".into()));
    }
    let n = ds.n_examples();
    let k = ds.n_classes();
    let init_scores = ds
        .class_counts()
        .iter()
        .map(|&c| {
            let p = (c as f64 / n as f64).clamp(1e-12, 1.0 - 1e-12);
            (p / (1.0 - p)).ln()
        })
        .collect::<Vec<_>>();
    let mut model = BoostModel {
        trees: vec![Vec::with_capacity(cfg.n_rounds); k],
        learning_rate: cfg.learning_rate,
        init_scores: init_scores.clone(),
    };
    let mut scores: Vec<Vec<f64>> = vec![init_scores; n];
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_leaf: 1,
    };
    let mut rng = rng_from_seed(cfg.seed);
    let n_sub = ((cfg.subsample * n as f64).round() as usize).clamp(1, n);
    let all: Vec<usize> = (0..n).collect();
    let mut residual = vec![0.0; n];

    for round in 0..cfg.n_rounds {
        let rows = if n_sub < n {
            let mut r = sample(&mut rng, n, n_sub).into_vec();
            r.sort_unstable();
            r
        } else {
            all.clone()
        };
        for c in 0..k {
            for i in 0..n {
                let y = if ds.labels[i] == c { 1.0 } else { 0.0 };
                residual[i] = y - sigmoid(scores[i][c]);
            }
            let tree = grow_regressor(&ds.features, &residual, &rows, &tree_cfg, 0);
            for (i, s) in scores.iter_mut().enumerate() {
                s[c] += cfg.learning_rate * tree.leaf_value(ds.features.row(i))[0];
                if !s[c].is_finite() {
                    return Err(Error::Numeric(format!("boosting score became non-finite in round {round}")));
                }
            }
            model.trees[c].push(tree);
        }
        on_round(&model);
    }
    Ok(model)
}

pub fn fit_boosting(ds: &Dataset, cfg: &BoostConfig) -> Result<BoostModel> {
    boost_rounds(ds, cfg, |_| {})
}

/// Like [`fit_boosting`] but also returns the training loss after each round.
pub fn fit_boosting_traced(ds: &Dataset, cfg: &BoostConfig) -> Result<(BoostModel, Vec<f64>)> {
    let mut losses = Vec::with_capacity(cfg.n_rounds);
    let model = boost_rounds(ds, cfg, |m| losses.push(m.training_loss(ds)))?;
    Ok((model, losses))
}

/// Per-class sigmoids renormalised onto the simplex.
pub fn predict_boost(model: &BoostModel, x: ArrayView1<f64>) -> Vec<f64> {
    let p: Vec<f64> = model.scores(x).into_iter().map(sigmoid).collect();
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.into_iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / p.len() as f64; p.len()]
    }
}
