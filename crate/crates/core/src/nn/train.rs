use std::path::Path;

use rand::seq::SliceRandom;

use super::model::{ModelConfig, ModelParams, Sequence};
use super::optim::{adam_step, sgd_step, AdamState, OptimizerKind, TrainConfig};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Sequences with their class ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceSet {
    pub xs: Vec<Sequence>,
    pub labels: Vec<usize>,
}

impl SequenceSet {
    pub fn new(xs: Vec<Sequence>, labels: Vec<usize>) -> Result<Self> {
        if xs.len() != labels.len() {
            return Err(Error::dim("sequence labels", xs.len(), labels.len()));
        }
        Ok(Self { xs, labels })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Mean loss and accuracy of `params` over `set`, summed in index order.
pub fn evaluate(params: &ModelParams, set: &SequenceSet) -> Result<(f64, f64)> {
    if set.is_empty() {
        return Err(Error::EmptyDataset("cannot evaluate on zero sequences".into()));
    }
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (xs, &y) in set.xs.iter().zip(&set.labels) {
        let logits = params.logits(xs)?;
        loss += super::loss::softmax_cross_entropy(&logits, y).0;
        if super::loss::argmax(&logits) == y {
            correct += 1;
        }
    }
    Ok((loss / set.len() as f64, correct as f64 / set.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub train_acc: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub val_acc: Vec<f64>,
}

pub const HISTORY_HEADER: &str = "epoch,train_loss,train_acc,val_loss,val_acc";

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.train_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_loss.is_empty()
    }

    fn push(&mut self, train: (f64, f64), val: (f64, f64)) {
        self.train_loss.push(train.0);
        self.train_acc.push(train.1);
        self.val_loss.push(val.0);
        self.val_acc.push(val.1);
    }

    /// Epoch of the lowest validation loss (first one on ties).
    pub fn best_epoch(&self) -> Option<usize> {
        (0..self.len()).reduce(|best, i| if self.val_loss[i] < self.val_loss[best] { i } else { best })
    }

    /// CSV with a 1-based epoch column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(HISTORY_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                self.train_loss[i],
                self.train_acc[i],
                self.val_loss[i],
                self.val_acc[i]
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(HISTORY_HEADER) {
            return Err(Error::Data(format!("history CSV must start with '{HISTORY_HEADER}'")));
        }
        let mut h = TrainHistory::default();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cells: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Data(format!("history row {}: {e}", i + 1)))?;
            if cells.len() != 5 {
                return Err(Error::Data(format!("history row {} has {} fields", i + 1, cells.len())));
            }
            h.push((cells[1], cells[2]), (cells[3], cells[4]));
        }
        Ok(h)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}

fn check_set(cfg: &ModelConfig, set: &SequenceSet, name: &str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyDataset(format!("{name} set has no sequences")));
    }
    for (xs, &y) in set.xs.iter().zip(&set.labels) {
        if y >= cfg.n_classes {
            return Err(Error::Data(format!("{name} label {y} out of range for {} classes", cfg.n_classes)));
        }
        if xs.len() != cfg.sequence_length {
            return Err(Error::dim(format!("{name} sequence length"), cfg.sequence_length, xs.len()));
        }
        if let Some(frame) = xs.iter().find(|f| f.len() != cfg.input_dim) {
            return Err(Error::dim(format!("{name} frame width"), cfg.input_dim, frame.len()));
        }
    }
    Ok(())
}

/// Trains a freshly initialised model.
pub fn train(
    model: &ModelConfig,
    train_set: &SequenceSet,
    val_set: &SequenceSet,
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainHistory)> {
    let init = ModelParams::init(model)?;
    train_from(model, init, train_set, val_set, cfg)
}

/// Mini-batch training with seeded per-epoch shuffling and early stopping on
/// validation loss. The returned parameters are those of the best epoch.
pub fn train_from(
    model: &ModelConfig,
    mut params: ModelParams,
    train_set: &SequenceSet,
    val_set: &SequenceSet,
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainHistory)> {
    model.validate()?;
    cfg.validate()?;
    check_set(model, train_set, "training")?;
    check_set(model, val_set, "validation")?;

    let mut rng = rng_from_seed(cfg.seed);
    let mut adam = AdamState::default();
    let mut history = TrainHistory::default();
    let mut best: Option<(f64, ModelParams)> = None;
    let mut since_best = 0;
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        for (batch_idx, batch) in order.chunks(cfg.batch_size).enumerate() {
            let mut grads = ModelParams::zeros(model);
            for &i in batch {
                let (loss, g) = params.loss_and_grad(&train_set.xs[i], train_set.labels[i])?;
                if !loss.is_finite() {
                    return Err(Error::Numeric(format!(
                        "non-finite loss at epoch {}, batch {batch_idx}",
                        epoch + 1
                    )));
                }
                grads.add_scaled(&g, 1.0);
            }
            let mut mean = ModelParams::zeros(model);
            mean.add_scaled(&grads, 1.0 / batch.len() as f64);
            let step = match cfg.optimizer {
                OptimizerKind::Adam => adam_step(&mut params, &mean, &mut adam, cfg),
                OptimizerKind::Sgd => sgd_step(&mut params, &mean, cfg),
            };
            step.map_err(|e| Error::Numeric(format!("epoch {}, batch {batch_idx}: {e}", epoch + 1)))?;
        }

        let tr = evaluate(&params, train_set)?;
        let va = evaluate(&params, val_set)?;
        if !(tr.0.is_finite() && va.0.is_finite()) {
            return Err(Error::Numeric(format!("non-finite loss after epoch {}", epoch + 1)));
        }
        history.push(tr, va);

        if best.as_ref().is_none_or(|(b, _)| va.0 < *b) {
            best = Some((va.0, params.clone()));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    let params = best.map_or(params, |(_, p)| p);
    Ok((params, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn history_csv_roundtrip() {
        let h = TrainHistory {
            train_loss: vec![1.0986, 0.5, 1.0 / 3.0],
            train_acc: vec![0.3, 0.6, 1.0],
            val_loss: vec![1.1, 0.7, 0.65],
            val_acc: vec![0.25, 0.5, 0.75],
        };
        let text = h.to_csv();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(TrainHistory::from_csv(&text).unwrap(), h);
        assert_eq!(h.best_epoch(), Some(2));
        assert!(TrainHistory::from_csv("a,b\n").is_err());
    }

    fn tiny() -> (ModelConfig, SequenceSet) {
        let cfg = ModelConfig {
            input_dim: 1,
            hidden_dim: 3,
            sequence_length: 2,
            n_classes: 2,
            seed: 5,
        };
        let xs = vec![vec![array![1.0], array![0.0]], vec![array![0.0], array![1.0]]];
        (cfg, SequenceSet::new(xs, vec![0, 1]).unwrap())
    }

    #[test]
    fn zero_rate_freezes_model() {
        let (m, set) = tiny();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            max_epochs: 5,
            patience: 100,
            ..TrainConfig::default()
        };
        let (p, h) = train(&m, &set, &set, &cfg).unwrap();
        assert_eq!(p, ModelParams::init(&m).unwrap());
        assert_eq!(h.len(), 5);
        assert!(h.train_loss.iter().all(|&l| l == h.train_loss[0]));
        assert!(h.val_acc.iter().all(|&a| a == h.val_acc[0]));
    }

    #[test]
    fn rejects_bad_labels_and_shapes() {
        let (m, set) = tiny();
        let bad = SequenceSet::new(set.xs.clone(), vec![0, 2]).unwrap();
        assert!(train(&m, &bad, &set, &TrainConfig::default()).is_err());
        let short = SequenceSet::new(vec![vec![array![1.0]]], vec![0]).unwrap();
        assert!(train(&m, &short, &set, &TrainConfig::default()).is_err());
        assert!(train(&m, &SequenceSet::default(), &set, &TrainConfig::default()).is_err());
    }
}
