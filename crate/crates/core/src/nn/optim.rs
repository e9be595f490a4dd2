use serde::{Deserialize, Serialize};

use super::model::Parameters;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Adam,
    Sgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Adam,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            max_epochs: 200,
            patience: 10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // A zero rate is accepted: it freezes the model, which is useful for
        // checking the pipeline end to end.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate {} must be ≥ 0", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("Adam betas must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("Adam epsilon must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// First and second moment estimates, one buffer per tensor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
}

fn check_finite<P: Parameters>(grads: &P) -> Result<()> {
    for (name, g) in grads.tensors() {
        if let Some(i) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite gradient in {name}[{i}]: {}", g[i])));
        }
    }
    Ok(())
}

/// One Adam update with bias correction.
pub fn adam_step<P: Parameters>(params: &mut P, grads: &P, state: &mut AdamState, cfg: &TrainConfig) -> Result<()> {
    check_finite(grads)?;
    if state.m.is_empty() {
        state.m = grads.tensors().iter().map(|(_, g)| vec![0.0; g.len()]).collect();
        state.v = state.m.clone();
    }
    state.t += 1;
    let bc1 = 1.0 - cfg.beta1.powf(state.t as f64);
    let bc2 = 1.0 - cfg.beta2.powf(state.t as f64);
    let tensors = params.tensors_mut().into_iter().zip(grads.tensors());
    for (((_, p), (_, g)), (m, v)) in tensors.zip(state.m.iter_mut().zip(state.v.iter_mut())) {
        for i in 0..p.len() {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            p[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}

pub fn sgd_step<P: Parameters>(params: &mut P, grads: &P, cfg: &TrainConfig) -> Result<()> {
    check_finite(grads)?;
    for ((_, p), (_, g)) in params.tensors_mut().into_iter().zip(grads.tensors()) {
        for (pi, gi) in p.iter_mut().zip(g) {
            *pi -= cfg.learning_rate * gi;
        }
    }
    Ok(())
}
