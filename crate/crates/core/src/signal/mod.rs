//! Deterministic DSP front end and feature extraction.

mod artifact;
mod features;
mod filter;
mod normalize;
mod stats;
mod welch;

use serde::{Deserialize, Serialize};

pub use artifact::reject_artifacts;
pub use features::{default_bands, extract_features, Band, FeatureConfig, FeatureVector, WelchConfig};
pub use filter::{design_butterworth_bandpass, filtfilt, FilterCoefficients, Sos, SUPPORTED_ORDERS};
pub use normalize::{
    apply_normalization, fit_normalization, FittedNormalization, NormMode, NormalizationParams,
};
pub use stats::{time_domain_stats, TimeStats, TIME_STAT_NAMES};
pub use welch::{band_power, spectral_entropy, welch_psd, Psd, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    pub order: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            low_hz: 0.5,
            high_hz: 45.0,
            order: 4,
        }
    }
}

/// Everything the featurisation stage needs; the JSON feature config file
/// deserialises into this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalConfig {
    pub filter: FilterConfig,
    pub artifact_threshold_uv: f64,
    pub normalization: NormMode,
    #[serde(flatten)]
    pub features: FeatureConfig,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            filter: FilterConfig::default(),
            artifact_threshold_uv: 100.0,
            normalization: NormMode::Zscore,
            features: FeatureConfig::default(),
        }
    }
}
