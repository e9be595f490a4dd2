//! Linear models: multinomial logistic regression and one-vs-rest linear SVM.

use ndarray::{Array1, ArrayView1, Axis};
#[cfg(test)]
use ndarray::Array2;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::nn::{argmax, softmax};
use crate::rng::rng_from_seed;

/// `scores = W x + b`, `W: [classes × features]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(n_classes: usize, n_features: usize) -> Self {
        Self {
            weights: vec![vec![0.0; n_features]; n_classes],
            bias: vec![0.0; n_classes],
        }
    }

    pub fn scores(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            iterations: 500,
            l2: 1e-4,
        }
    }
}

/// Mean cross-entropy plus `l2/2·‖W‖²` and its gradient.
pub fn logistic_loss_and_grad(model: &LinearModel, ds: &Dataset, l2: f64) -> (f64, LinearModel) {
    let n = ds.n_examples() as f64;
    let mut grad = LinearModel::zeros(model.bias.len(), ds.n_features());
    let mut loss = 0.0;
    for (x, &y) in ds.features.axis_iter(Axis(0)).zip(&ds.labels) {
        let p = softmax(&model.scores(x));
        loss -= p[y].max(f64::MIN_POSITIVE).ln();
        for (c, pc) in p.iter().enumerate() {
            let d = (pc - if c == y { 1.0 } else { 0.0 }) / n;
            for (g, xi) in grad.weights[c].iter_mut().zip(x) {
                *g += d * xi;
            }
            grad.bias[c] += d;
        }
    }
    let mut reg = 0.0;
    for (g, w) in grad.weights.iter_mut().zip(&model.weights) {
        for (gi, wi) in g.iter_mut().zip(w) {
            *gi += l2 * wi;
            reg += wi * wi;
        }
    }
    (loss / n + 0.5 * l2 * reg, grad)
}

/// Softmax regression by full-batch gradient descent from zero weights.
pub fn fit_logistic(ds: &Dataset, cfg: &LogisticConfig) -> Result<LinearModel> {
    if ds.n_classes() < 2 {
        return Err(Error::Data("logistic regression needs at least two classes".into()));
    }
    if ds.n_examples() == 0 {
        return Err(Error::EmptyDataset("cannot fit logistic regression on zero rows".into()));
    }
    let mut model = LinearModel::zeros(ds.n_classes(), ds.n_features());
    for it in 0..cfg.iterations {
        let (loss, g) = logistic_loss_and_grad(&model, ds, cfg.l2);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("logistic regression diverged at iteration {it}")));
        }
        for (w, gw) in model.weights.iter_mut().zip(&g.weights) {
            for (wi, gi) in w.iter_mut().zip(gw) {
                *wi -= cfg.learning_rate * gi;
            }
        }
        for (b, gb) in model.bias.iter_mut().zip(&g.bias) {
            *b -= cfg.learning_rate * gb;
        }
    }
    Ok(model)
}

pub fn predict_logistic(model: &LinearModel, x: ArrayView1<f64>) -> Vec<f64> {
    softmax(&model.scores(x)).to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    /// Inverse regularisation strength; `λ = 1 / (c · n)`.
    pub c: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 10.0,
            epochs: 100,
            learning_rate: 0.05,
            seed: 0,
        }
    }
}

/// One-vs-rest hinge loss minimised by seeded SGD. The returned weights are
/// the average of the iterates over the second half of training.
pub fn fit_linear_svm(ds: &Dataset, cfg: &SvmConfig) -> Result<LinearModel> {
    if ds.n_examples() == 0 {
        return Err(Error::EmptyDataset("cannot fit an SVM on zero rows".into()));
    }
    if !(cfg.c > 0.0) || cfg.epochs == 0 {
        return Err(Error::Config("SVM needs c > 0 and at least one epoch".into()));
    }
    let n = ds.n_examples();
    let d = ds.n_features();
    let lambda = 1.0 / (cfg.c * n as f64);
    let mut rng = rng_from_seed(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut model = LinearModel::zeros(ds.n_classes(), d);
    let mut avg = LinearModel::zeros(ds.n_classes(), d);
    let mut n_avg = 0usize;
    let mut t = 0usize;
    let avg_from = cfg.epochs / 2;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = cfg.learning_rate / (1.0 + cfg.learning_rate * lambda * t as f64);
            let x = ds.features.row(i);
            for c in 0..ds.n_classes() {
                let y = if ds.labels[i] == c { 1.0 } else { -1.0 };
                let w = &mut model.weights[c];
                let margin = y * (w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + model.bias[c]);
                let shrink = 1.0 - eta * lambda;
                w.iter_mut().for_each(|v| *v *= shrink);
                if margin < 1.0 {
                    for (wi, xi) in w.iter_mut().zip(x) {
                        *wi += eta * y * xi;
                    }
                    model.bias[c] += eta * y;
                }
            }
            if epoch >= avg_from {
                n_avg += 1;
                let k = 1.0 / n_avg as f64;
                for (a, w) in avg.weights.iter_mut().zip(&model.weights) {
                    for (ai, wi) in a.iter_mut().zip(w) {
                        *ai += (wi - *ai) * k;
                    }
                }
                for (a, b) in avg.bias.iter_mut().zip(&model.bias) {
                    *a += (b - *a) * k;
                }
            }
        }
    }
    Ok(avg)
}

/// Mean one-vs-rest hinge loss of `model` on `ds`.
pub fn hinge_loss(model: &LinearModel, ds: &Dataset) -> f64 {
    let mut total = 0.0;
    for (x, &label) in ds.features.axis_iter(Axis(0)).zip(&ds.labels) {
        for (c, s) in model.scores(x).iter().enumerate() {
            let y = if label == c { 1.0 } else { -1.0 };
            total += (1.0 - y * s).max(0.0);
        }
    }
    total / ds.n_examples() as f64
}

/// Class with the largest margin (ties → lowest id) and all margins.
pub fn predict_svm(model: &LinearModel, x: ArrayView1<f64>) -> (usize, Vec<f64>) {
    let s = model.scores(x);
    (argmax(&s), s.to_vec())
}
