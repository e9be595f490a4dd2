//! Run configuration and the stage functions shared by the CLI and the demo.

use std::path::Path;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::baselines::{
    fit_boosting, fit_forest, fit_linear_svm, fit_logistic, BaselineModel, BoostConfig, ForestConfig,
    LogisticConfig, SvmConfig,
};
use crate::dataio::{stratified_split, Dataset, Recording, SplitSpec, DEFAULT_LABEL_COLUMN};
use crate::error::{Error, Result};
use crate::eval::{compare_report, confusion, metrics, ComparisonTable, ConfusionMatrix, MetricsReport};
use crate::nn::{
    rows_to_sequences, train_from, Checkpoint, ModelConfig, ModelParams, SequenceSet, TrainConfig, TrainHistory,
};
use crate::rng::derive_seed;
use crate::signal::{
    apply_normalization, design_butterworth_bandpass, extract_features, filtfilt, fit_normalization,
    reject_artifacts, NormalizationParams, SignalConfig,
};
use crate::dataio::window_recording;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSettings {
    pub per_class: usize,
    pub window_len: usize,
    pub sample_rate_hz: f64,
}

impl Default for SynthSettings {
    fn default() -> Self {
        Self {
            per_class: 100,
            window_len: 512,
            sample_rate_hz: 256.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpochSettings {
    pub window_len: usize,
    pub hop: usize,
}

impl Default for EpochSettings {
    fn default() -> Self {
        Self { window_len: 512, hop: 512 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSettings {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub stratified: bool,
}

impl Default for SplitSettings {
    fn default() -> Self {
        Self {
            train: 0.6,
            val: 0.2,
            test: 0.2,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GruSettings {
    pub hidden_dim: usize,
    /// Frames per example; each feature row is cut into this many equal
    /// slices, one per channel for the default feature layout.
    pub sequence_length: usize,
}

impl Default for GruSettings {
    fn default() -> Self {
        Self {
            hidden_dim: 32,
            sequence_length: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct BaselineSettings {
    pub logistic: LogisticConfig,
    pub svm: SvmConfig,
    pub forest: ForestConfig,
    pub boosting: BoostConfig,
}

/// Every knob of the pipeline. Seeds inside sub-configs are ignored: each is
/// derived from `seed` and the component name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub label_column: String,
    pub synth: SynthSettings,
    pub epoching: EpochSettings,
    pub signal: SignalConfig,
    pub split: SplitSettings,
    pub gru: GruSettings,
    pub train: TrainConfig,
    pub baselines: BaselineSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            label_column: DEFAULT_LABEL_COLUMN.to_string(),
            synth: SynthSettings::default(),
            epoching: EpochSettings::default(),
            signal: SignalConfig::default(),
            split: SplitSettings::default(),
            gru: GruSettings::default(),
            train: TrainConfig::default(),
            baselines: BaselineSettings::default(),
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; missing keys keep their defaults, unknown keys are
    /// rejected.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg: RunConfig = serde_json::from_value(value.clone()).map_err(|e| Error::Config(e.to_string()))?;
        let unknown = unknown_keys(&value, &serde_json::to_value(&cfg)?, "");
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown config keys: {}", unknown.join(", "))));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn sub_seed(&self, component: &str) -> u64 {
        derive_seed(self.seed, component)
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.split.train,
            val_fraction: self.split.val,
            test_fraction: self.split.test,
            seed: self.sub_seed("split"),
            stratified: self.split.stratified,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.sub_seed("gru.train"),
            ..self.train.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.split_spec().validate()?;
        self.train.validate()?;
        if self.gru.hidden_dim == 0 || self.gru.sequence_length == 0 {
            return Err(Error::Config("GRU hidden_dim and sequence_length must be ≥ 1".into()));
        }
        if self.epoching.window_len == 0 || self.epoching.hop == 0 {
            return Err(Error::Config("epoch window_len and hop must be ≥ 1".into()));
        }
        Ok(())
    }
}

fn unknown_keys(given: &serde_json::Value, known: &serde_json::Value, prefix: &str) -> Vec<String> {
    let (Some(g), Some(k)) = (given.as_object(), known.as_object()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (key, v) in g {
        let path = format!("{prefix}{key}");
        match k.get(key) {
            None => out.push(path),
            Some(kv) => out.extend(unknown_keys(v, kv, &format!("{path}."))),
        }
    }
    out
}

pub struct Featurized {
    pub dataset: Dataset,
    pub n_epochs: usize,
    pub rejected: usize,
}

/// Band-pass filter each recording, cut it into epochs, drop epochs whose
/// peak exceeds the artifact threshold and extract one feature row per epoch.
pub fn featurize(recordings: &[Recording], class_names: &[String], cfg: &RunConfig) -> Result<Featurized> {
    let first = recordings
        .first()
        .ok_or_else(|| Error::EmptyDataset("no recordings to featurize".into()))?;
    let channels = first.channels().to_vec();
    let fs = first.sample_rate_hz();
    let f = &cfg.signal.filter;
    let coeffs = design_butterworth_bandpass(f.low_hz, f.high_hz, fs, f.order)?;

    let mut epochs = Vec::new();
    for rec in recordings {
        if rec.sample_rate_hz() != fs || rec.channels() != channels.as_slice() {
            return Err(Error::Data("all recordings must share channels and sample rate".into()));
        }
        let filtered = rec
            .data()
            .iter()
            .map(|x| filtfilt(&coeffs, x))
            .collect::<Result<Vec<_>>>()?;
        let rec = Recording::new(channels.clone(), fs, filtered, rec.label())?;
        epochs.extend(window_recording(&rec, cfg.epoching.window_len, cfg.epoching.hop)?);
    }
    let n_epochs = epochs.len();
    let (kept, rejected) = reject_artifacts(epochs, cfg.signal.artifact_threshold_uv);

    let feature_names = cfg.signal.features.feature_names(&channels);
    let mut features = Array2::zeros((kept.len(), feature_names.len()));
    let mut labels = Vec::with_capacity(kept.len());
    for (mut row, epoch) in features.axis_iter_mut(Axis(0)).zip(&kept) {
        let fv = extract_features(epoch, &channels, fs, &cfg.signal.features)?;
        row.assign(&ndarray::ArrayView1::from(&fv.values));
        labels.push(epoch.label);
    }
    let dataset = Dataset::new(features, labels, class_names.to_vec(), feature_names)?;
    Ok(Featurized {
        dataset,
        n_epochs,
        rejected,
    })
}

pub fn split(ds: &Dataset, cfg: &RunConfig) -> Result<(Dataset, Dataset, Dataset)> {
    stratified_split(ds, &cfg.split_spec())
}

/// Re-indexes `ds` labels onto `class_names`, which must contain every class
/// present in `ds`.
pub fn align_classes(ds: &Dataset, class_names: &[String]) -> Result<Dataset> {
    if ds.class_names == class_names {
        return Ok(ds.clone());
    }
    let map = ds
        .class_names
        .iter()
        .map(|n| {
            class_names
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::Data(format!("class '{n}' is unknown to the model")))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(
        ds.features.clone(),
        ds.labels.iter().map(|&l| map[l]).collect(),
        class_names.to_vec(),
        ds.feature_names.clone(),
    )
}

fn sequences(ds: &Dataset, sequence_length: usize) -> Result<SequenceSet> {
    SequenceSet::new(rows_to_sequences(&ds.features, sequence_length)?, ds.labels.clone())
}

fn check_features(expected: &[String], ds: &Dataset) -> Result<()> {
    if expected.len() != ds.n_features() {
        return Err(Error::dim("feature count", expected.len(), ds.n_features()));
    }
    Ok(())
}

/// Normalise with statistics from `train`, reshape into sequences and train
/// the GRU. With `resume`, training continues from the checkpoint's weights
/// and normalisation.
pub fn train_gru(
    train: &Dataset,
    val: &Dataset,
    cfg: &RunConfig,
    resume: Option<&Checkpoint>,
) -> Result<(Checkpoint, TrainHistory)> {
    let val = align_classes(val, &train.class_names)?;
    check_features(&train.feature_names, &val)?;
    let (norm, model_cfg, init) = match resume {
        Some(ck) => {
            check_features(&ck.feature_names, train)?;
            let norm = ck
                .normalization
                .clone()
                .ok_or_else(|| Error::Data("checkpoint has no normalisation parameters".into()))?;
            (norm, ck.config, ck.params()?)
        }
        None => {
            let norm = fit_normalization(&train.features, cfg.signal.normalization)?.params;
            let model_cfg = ModelConfig {
                input_dim: train.n_features() / cfg.gru.sequence_length.max(1),
                hidden_dim: cfg.gru.hidden_dim,
                sequence_length: cfg.gru.sequence_length,
                n_classes: train.n_classes(),
                seed: cfg.sub_seed("gru.init"),
            };
            (norm, model_cfg, ModelParams::init(&model_cfg)?)
        }
    };
    let tr = sequences(&train.with_features(apply_normalization(&train.features, &norm)?)?, model_cfg.sequence_length)?;
    let va = sequences(&val.with_features(apply_normalization(&val.features, &norm)?)?, model_cfg.sequence_length)?;
    let (params, history) = train_from(&model_cfg, init, &tr, &va, &cfg.train_config())?;
    let ck = Checkpoint::new(
        model_cfg,
        &params,
        train.class_names.clone(),
        train.feature_names.clone(),
        Some(norm),
    );
    Ok((ck, history))
}

/// Predicted class ids for every row of `ds`.
pub fn predict_gru(ck: &Checkpoint, ds: &Dataset) -> Result<Vec<usize>> {
    check_features(&ck.feature_names, ds)?;
    let params = ck.params()?;
    let features = match &ck.normalization {
        Some(n) => apply_normalization(&ds.features, n)?,
        None => ds.features.clone(),
    };
    rows_to_sequences(&features, ck.config.sequence_length)?
        .iter()
        .map(|xs| params.predict(xs).map(|(c, _)| c))
        .collect()
}

pub fn score(preds: &[usize], ds: &Dataset) -> Result<(ConfusionMatrix, MetricsReport)> {
    let cm = confusion(preds, &ds.labels, &ds.class_names)?;
    let m = metrics(&cm)?;
    Ok((cm, m))
}

/// Evaluates a checkpoint on a labelled feature set.
pub fn evaluate_checkpoint(ck: &Checkpoint, ds: &Dataset) -> Result<(ConfusionMatrix, MetricsReport)> {
    let ds = align_classes(ds, &ck.class_names)?;
    score(&predict_gru(ck, &ds)?, &ds)
}

pub const MODEL_NAMES: [&str; 5] = ["GRU", "Gradient boosting", "Random forest", "Linear SVM", "Logistic regression"];

pub struct ModelResult {
    pub name: String,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

pub struct Comparison {
    pub table: ComparisonTable,
    pub results: Vec<ModelResult>,
    pub history: TrainHistory,
    pub checkpoint: Checkpoint,
}

fn fit_baselines(train: &Dataset, cfg: &RunConfig) -> Result<Vec<BaselineModel>> {
    let b = &cfg.baselines;
    let boosting = BoostConfig {
        seed: cfg.sub_seed("boosting"),
        ..b.boosting.clone()
    };
    let forest = ForestConfig {
        seed: cfg.sub_seed("forest"),
        ..b.forest.clone()
    };
    let svm = SvmConfig {
        seed: cfg.sub_seed("svm"),
        ..b.svm.clone()
    };
    Ok(vec![
        BaselineModel::Boosting(fit_boosting(train, &boosting)?),
        BaselineModel::Forest(fit_forest(train, &forest)?),
        BaselineModel::LinearSvm(fit_linear_svm(train, &svm)?),
        BaselineModel::Logistic(fit_logistic(train, &b.logistic)?),
    ])
}

/// Trains the GRU and every baseline on the same split and scores them all on
/// the same test set. Baselines see the GRU's normalised features.
pub fn compare(train: &Dataset, val: &Dataset, test: &Dataset, cfg: &RunConfig) -> Result<Comparison> {
    let test = align_classes(test, &train.class_names)?;
    let (ck, history) = train_gru(train, val, cfg, None)?;
    let norm: &NormalizationParams = ck.normalization.as_ref().expect("set by train_gru");

    let mut results = Vec::with_capacity(MODEL_NAMES.len());
    let (cm, m) = score(&predict_gru(&ck, &test)?, &test)?;
    results.push(ModelResult {
        name: MODEL_NAMES[0].into(),
        confusion: cm,
        metrics: m,
    });

    let train_n = train.with_features(apply_normalization(&train.features, norm)?)?;
    let test_n = test.with_features(apply_normalization(&test.features, norm)?)?;
    for (name, model) in MODEL_NAMES[1..].iter().zip(fit_baselines(&train_n, cfg)?) {
        let preds: Vec<usize> = test_n.features.axis_iter(Axis(0)).map(|x| model.predict(x)).collect();
        let (cm, m) = score(&preds, &test_n)?;
        results.push(ModelResult {
            name: (*name).into(),
            confusion: cm,
            metrics: m,
        });
    }
    let table = compare_report(
        &results
            .iter()
            .map(|r| (r.name.clone(), r.metrics.clone()))
            .collect::<Vec<_>>(),
    );
    Ok(Comparison {
        table,
        results,
        history,
        checkpoint: ck,
    })
}
