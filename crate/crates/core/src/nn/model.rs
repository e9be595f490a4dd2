use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::dense::{dense_backward, dense_forward, flatten, unflatten, DenseParams};
use super::gru::{gru_backward, gru_forward, GruParams};
use super::loss::{argmax, softmax, softmax_cross_entropy};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// One example: `sequence_length` frames of `input_dim` values.
pub type Sequence = Vec<Array1<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub sequence_length: usize,
    pub n_classes: usize,
    pub seed: u64,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.hidden_dim == 0 || self.sequence_length == 0 || self.n_classes == 0 {
            return Err(Error::Config(format!("model dimensions must all be ≥ 1: {self:?}")));
        }
        Ok(())
    }

    pub fn flat_dim(&self) -> usize {
        self.hidden_dim * self.sequence_length
    }
}

/// All trainable weights: GRU → flatten → dense. The same shape doubles as
/// the gradient buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub gru: GruParams,
    pub dense: DenseParams,
}

/// Iteration over named flat parameter tensors (row-major).
pub trait Parameters {
    fn tensors(&self) -> Vec<(&'static str, &[f64])>;
    fn tensors_mut(&mut self) -> Vec<(&'static str, &mut [f64])>;

    fn n_scalars(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }
}

pub const TENSOR_NAMES: [&str; 11] = [
    "gru.W_z", "gru.W_r", "gru.W_h", "gru.U_z", "gru.U_r", "gru.U_h", "gru.b_z", "gru.b_r", "gru.b_h",
    "dense.W", "dense.b",
];

impl Parameters for ModelParams {
    fn tensors(&self) -> Vec<(&'static str, &[f64])> {
        let g = &self.gru;
        let slices: [&[f64]; 11] = [
            g.w_z.as_slice().expect("standard layout"),
            g.w_r.as_slice().expect("standard layout"),
            g.w_h.as_slice().expect("standard layout"),
            g.u_z.as_slice().expect("standard layout"),
            g.u_r.as_slice().expect("standard layout"),
            g.u_h.as_slice().expect("standard layout"),
            g.b_z.as_slice().expect("standard layout"),
            g.b_r.as_slice().expect("standard layout"),
            g.b_h.as_slice().expect("standard layout"),
            self.dense.w.as_slice().expect("standard layout"),
            self.dense.b.as_slice().expect("standard layout"),
        ];
        TENSOR_NAMES.into_iter().zip(slices).collect()
    }

    fn tensors_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        let g = &mut self.gru;
        let slices: [&mut [f64]; 11] = [
            g.w_z.as_slice_mut().expect("standard layout"),
            g.w_r.as_slice_mut().expect("standard layout"),
            g.w_h.as_slice_mut().expect("standard layout"),
            g.u_z.as_slice_mut().expect("standard layout"),
            g.u_r.as_slice_mut().expect("standard layout"),
            g.u_h.as_slice_mut().expect("standard layout"),
            g.b_z.as_slice_mut().expect("standard layout"),
            g.b_r.as_slice_mut().expect("standard layout"),
            g.b_h.as_slice_mut().expect("standard layout"),
            self.dense.w.as_slice_mut().expect("standard layout"),
            self.dense.b.as_slice_mut().expect("standard layout"),
        ];
        TENSOR_NAMES.into_iter().zip(slices).collect()
    }
}

impl ModelParams {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        Self {
            gru: GruParams::zeros(cfg.input_dim, cfg.hidden_dim),
            dense: DenseParams::zeros(cfg.n_classes, cfg.flat_dim()),
        }
    }

    /// Seeded initialisation from `cfg.seed`.
    pub fn init(cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = rng_from_seed(cfg.seed);
        let gru = GruParams::init(cfg.input_dim, cfg.hidden_dim, &mut rng);
        let dense = DenseParams::init(cfg.n_classes, cfg.flat_dim(), &mut rng);
        Ok(Self { gru, dense })
    }

    pub fn config_shape(&self) -> (usize, usize, usize, usize) {
        let hidden = self.gru.hidden_dim();
        (
            self.gru.input_dim(),
            hidden,
            self.dense.w.ncols() / hidden,
            self.dense.w.nrows(),
        )
    }

    pub fn n_classes(&self) -> usize {
        self.dense.w.nrows()
    }

    fn check_sequence(&self, xs: &[Array1<f64>]) -> Result<()> {
        let expected = self.dense.w.ncols() / self.gru.hidden_dim();
        if xs.len() != expected {
            return Err(Error::dim("sequence length", expected, xs.len()));
        }
        Ok(())
    }

    pub fn logits(&self, xs: &[Array1<f64>]) -> Result<Array1<f64>> {
        self.check_sequence(xs)?;
        let (hs, _) = gru_forward(&self.gru, xs, None)?;
        dense_forward(&self.dense, &flatten(&hs))
    }

    /// Cross-entropy loss and its gradient with respect to every parameter.
    pub fn loss_and_grad(&self, xs: &[Array1<f64>], label: usize) -> Result<(f64, ModelParams)> {
        self.check_sequence(xs)?;
        if label >= self.n_classes() {
            return Err(Error::Data(format!("label {label} out of range for {} classes", self.n_classes())));
        }
        let (hs, caches) = gru_forward(&self.gru, xs, None)?;
        let flat = flatten(&hs);
        let logits = dense_forward(&self.dense, &flat)?;
        let (loss, grad_logits) = softmax_cross_entropy(&logits, label);
        let (dense, grad_flat) = dense_backward(&self.dense, &flat, &grad_logits)?;
        let grad_hs = unflatten(&grad_flat, self.gru.hidden_dim())?;
        let (gru, _) = gru_backward(&self.gru, &caches, &grad_hs)?;
        Ok((loss, ModelParams { gru, dense }))
    }

    pub fn loss(&self, xs: &[Array1<f64>], label: usize) -> Result<f64> {
        Ok(softmax_cross_entropy(&self.logits(xs)?, label).0)
    }

    /// Predicted class (ties → lowest id) and class probabilities.
    pub fn predict(&self, xs: &[Array1<f64>]) -> Result<(usize, Vec<f64>)> {
        let logits = self.logits(xs)?;
        let probs = softmax(&logits);
        Ok((argmax(&logits), probs.to_vec()))
    }

    /// `self += scale · other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &ModelParams, scale: f64) {
        for ((_, dst), (_, src)) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }
}

/// Reshapes each feature row into `sequence_length` consecutive frames.
pub fn rows_to_sequences(features: &ndarray::Array2<f64>, sequence_length: usize) -> Result<Vec<Sequence>> {
    let n = features.ncols();
    if sequence_length == 0 || !n.is_multiple_of(sequence_length) {
        return Err(Error::Config(format!(
            "{n} features cannot be split into {sequence_length} equal frames"
        )));
    }
    let frame = n / sequence_length;
    Ok(features
        .rows()
        .into_iter()
        .map(|row| {
            let row = row.to_vec();
            row.chunks(frame).map(|c| Array1::from(c.to_vec())).collect()
        })
        .collect())
}
