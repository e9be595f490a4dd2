//! Versioned JSON checkpoint: model config, row-major tensors, class names
//! and the normalisation fitted on the training split.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::dense::DenseParams;
use super::gru::GruParams;
use super::model::{ModelConfig, ModelParams, Parameters, TENSOR_NAMES};
use crate::error::{Error, Result};
use crate::signal::NormalizationParams;

pub const CHECKPOINT_FORMAT: &str = "eeg-gru-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub normalization: Option<NormalizationParams>,
    pub tensors: Vec<Tensor>,
}

fn shapes(cfg: &ModelConfig) -> [Vec<usize>; 11] {
    let (i, h, c, f) = (cfg.input_dim, cfg.hidden_dim, cfg.n_classes, cfg.flat_dim());
    [
        vec![h, i],
        vec![h, i],
        vec![h, i],
        vec![h, h],
        vec![h, h],
        vec![h, h],
        vec![h],
        vec![h],
        vec![h],
        vec![c, f],
        vec![c],
    ]
}

impl Checkpoint {
    pub fn new(
        config: ModelConfig,
        params: &ModelParams,
        class_names: Vec<String>,
        feature_names: Vec<String>,
        normalization: Option<NormalizationParams>,
    ) -> Self {
        let tensors = params
            .tensors()
            .into_iter()
            .zip(shapes(&config))
            .map(|((name, data), shape)| Tensor {
                name: name.to_owned(),
                shape,
                data: data.to_vec(),
            })
            .collect();
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config,
            class_names,
            feature_names,
            normalization,
            tensors,
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let expected = shapes(&self.config);
        if self.tensors.len() != TENSOR_NAMES.len() {
            return Err(Error::dim("checkpoint tensors", TENSOR_NAMES.len(), self.tensors.len()));
        }
        for ((t, name), shape) in self.tensors.iter().zip(TENSOR_NAMES).zip(&expected) {
            if t.name != name || &t.shape != shape || t.data.len() != shape.iter().product::<usize>() {
                return Err(Error::Data(format!(
                    "checkpoint tensor '{}' {:?} does not match expected '{name}' {shape:?}",
                    t.name, t.shape
                )));
            }
        }
        let m = |k: usize| {
            let s = &self.tensors[k].shape;
            Array2::from_shape_vec((s[0], s[1]), self.tensors[k].data.clone()).expect("shape checked")
        };
        let v = |k: usize| Array1::from(self.tensors[k].data.clone());
        Ok(ModelParams {
            gru: GruParams {
                w_z: m(0),
                w_r: m(1),
                w_h: m(2),
                u_z: m(3),
                u_r: m(4),
                u_h: m(5),
                b_z: v(6),
                b_r: v(7),
                b_h: v(8),
            },
            dense: DenseParams { w: m(9), b: v(10) },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint = serde_json::from_str(&text)?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(Error::Data(format!(
                "{}: unsupported checkpoint {} v{}",
                path.display(),
                ck.format,
                ck.version
            )));
        }
        Ok(ck)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{fit_normalization, NormMode};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn save_load_is_bit_exact(seed in any::<u64>(), hidden in 1usize..5, t in 1usize..4) {
            let cfg = ModelConfig { input_dim: 3, hidden_dim: hidden, sequence_length: t, n_classes: 3, seed };
            let params = ModelParams::init(&cfg).unwrap();
            let x = ndarray::Array2::from_shape_fn((4, 3), |(i, j)| (seed as f64).sin() * (i * 3 + j) as f64 / 7.0);
            let norm = fit_normalization(&x, NormMode::Zscore).unwrap().params;
            let ck = Checkpoint::new(cfg, &params, vec!["A".into(), "B".into(), "C".into()], vec!["f".into(); 3], Some(norm));
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("model.json");
            ck.save(&path).unwrap();
            let back = Checkpoint::load(&path).unwrap();
            prop_assert_eq!(&back, &ck);
            let restored = back.params().unwrap();
            for ((_, a), (_, b)) in restored.tensors().iter().zip(params.tensors()) {
                prop_assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
        }
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ModelConfig { input_dim: 1, hidden_dim: 1, sequence_length: 1, n_classes: 2, seed: 0 };
        let mut ck = Checkpoint::new(cfg, &ModelParams::init(&cfg).unwrap(), vec![], vec![], None);
        ck.version = 99;
        let path = dir.path().join("m.json");
        ck.save(&path).unwrap();
        assert!(Checkpoint::load(&path).is_err());
        ck.version = CHECKPOINT_VERSION;
        ck.tensors[0].shape = vec![2, 2];
        assert!(ck.params().is_err());
    }
}
