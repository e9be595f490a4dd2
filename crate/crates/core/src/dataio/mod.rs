//! Dataset ingestion, epoching, splitting and synthetic data.

mod featured;
mod raw;
mod split;
mod synth;
mod window;

use ndarray::Array2;

use crate::error::{Error, Result};

pub use featured::{load_feature_csv, write_feature_csv, DEFAULT_LABEL_COLUMN};
pub use raw::{
    load_raw_recordings, read_manifest, write_manifest, write_recording_csv, ManifestRow,
    DEFAULT_SAMPLE_RATE_HZ,
};
pub use split::{stratified_split, write_split, SplitCounts, SplitSidecar, SplitSpec};
pub use synth::{synth_generate, SynthBand, SYNTH_BANDS, SYNTH_CHANNELS, SYNTH_CLASS_NAMES};
pub use window::window_recording;

/// Multichannel raw EEG, one row of microvolt samples per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    channels: Vec<String>,
    sample_rate_hz: f64,
    data: Vec<Vec<f64>>,
    label: Option<usize>,
}

impl Recording {
    pub fn new(
        channels: Vec<String>,
        sample_rate_hz: f64,
        data: Vec<Vec<f64>>,
        label: Option<usize>,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::Data("recording has no channels".into()));
        }
        if channels.len() != data.len() {
            return Err(Error::dim("recording channel rows", channels.len(), data.len()));
        }
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::Data(format!("sample rate must be positive, got {sample_rate_hz}")));
        }
        let n = data[0].len();
        if n == 0 {
            return Err(Error::Data("recording has no samples".into()));
        }
        if let Some(row) = data.iter().position(|r| r.len() != n) {
            return Err(Error::dim(format!("samples in channel {}", channels[row]), n, data[row].len()));
        }
        Ok(Self {
            channels,
            sample_rate_hz,
            data,
            label,
        })
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.data
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_samples(&self) -> usize {
        self.data[0].len()
    }
}

/// A fixed-length labeled window of a recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    /// `[n_channels][window_len]`, microvolts.
    pub data: Vec<Vec<f64>>,
    pub label: usize,
    /// Sample index of the first sample in the parent recording.
    pub source_offset: usize,
}

impl Epoch {
    pub fn window_len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Largest absolute sample value over all channels.
    pub fn peak_abs(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Feature matrix with integer labels and name tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let ds = Self {
            features,
            labels,
            class_names,
            feature_names,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.features.nrows() {
            return Err(Error::dim("dataset labels", self.features.nrows(), self.labels.len()));
        }
        if self.feature_names.len() != self.features.ncols() {
            return Err(Error::dim("dataset feature names", self.features.ncols(), self.feature_names.len()));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.class_names.len()) {
            return Err(Error::Data(format!(
                "label id {bad} out of range for {} classes",
                self.class_names.len()
            )));
        }
        if let Some(((r, c), v)) = self.features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite feature {v} at row {r}, column {c}")));
        }
        Ok(())
    }

    pub fn n_examples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Per-class example counts, indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows `idx` in the given order, sharing the name tables.
    pub fn select(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(ndarray::Axis(0), idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Same rows with a replaced feature matrix (e.g. after normalisation).
    pub fn with_features(&self, features: Array2<f64>) -> Result<Dataset> {
        Dataset::new(
            features,
            self.labels.clone(),
            self.class_names.clone(),
            self.feature_names.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recording_rejects_ragged_rows() {
        let err = Recording::new(
            vec!["A".into(), "B".into()],
            256.0,
            vec![vec![0.0; 3], vec![0.0; 2]],
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn recording_rejects_bad_rate_and_empty() {
        assert!(Recording::new(vec!["A".into()], 0.0, vec![vec![1.0]], None).is_err());
        assert!(Recording::new(vec!["A".into()], 256.0, vec![vec![]], None).is_err());
        assert!(Recording::new(vec![], 256.0, vec![], None).is_err());
    }

    #[test]
    fn dataset_rejects_nan_and_bad_label() {
        let f = Array2::from_shape_vec((1, 1), vec![f64::NAN]).unwrap();
        assert!(Dataset::new(f, vec![0], vec!["A".into()], vec!["x".into()]).is_err());
        let f = Array2::zeros((1, 1));
        assert!(Dataset::new(f, vec![1], vec!["A".into()], vec!["x".into()]).is_err());
    }
}
