use serde::{Deserialize, Serialize};

use super::stats::{time_domain_stats, TIME_STAT_NAMES};
use super::welch::{band_power, spectral_entropy, welch_psd, Window};
use crate::dataio::Epoch;
use crate::error::{Error, Result};

/// Named feature values, parallel vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<String>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: String,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Band {
    fn new(name: &str, low_hz: f64, high_hz: f64) -> Self {
        Self {
            name: name.into(),
            low_hz,
            high_hz,
        }
    }
}

/// The classic EEG rhythm bands: delta, theta, alpha, beta, gamma.
pub fn default_bands() -> Vec<Band> {
    vec![
        Band::new("delta", 0.5, 4.0),
        Band::new("theta", 4.0, 8.0),
        Band::new("alpha", 8.0, 13.0),
        Band::new("beta", 13.0, 30.0),
        Band::new("gamma", 30.0, 45.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WelchConfig {
    pub segment_len: usize,
    pub overlap: f64,
    pub window: Window,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            segment_len: 256,
            overlap: 0.5,
            window: Window::Hann,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub bands: Vec<Band>,
    pub welch: WelchConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            bands: default_bands(),
            welch: WelchConfig::default(),
        }
    }
}

impl FeatureConfig {
    pub fn features_per_channel(&self) -> usize {
        self.bands.len() + 1 + TIME_STAT_NAMES.len()
    }

    /// Column names for the given channels, in extraction order.
    pub fn feature_names(&self, channels: &[String]) -> Vec<String> {
        let mut names = Vec::with_capacity(channels.len() * self.features_per_channel());
        for ch in channels {
            for b in &self.bands {
                names.push(format!("{ch}.bandpower.{}", b.name));
            }
            names.push(format!("{ch}.entropy"));
            for s in TIME_STAT_NAMES {
                names.push(format!("{ch}.{s}"));
            }
        }
        names
    }
}

/// Per channel: band powers, spectral entropy and the eight time-domain
/// statistics, named `<channel>.<feature>`.
pub fn extract_features(
    epoch: &Epoch,
    channels: &[String],
    fs_hz: f64,
    cfg: &FeatureConfig,
) -> Result<FeatureVector> {
    if channels.len() != epoch.data.len() {
        return Err(Error::dim("epoch channels", channels.len(), epoch.data.len()));
    }
    let mut values = Vec::with_capacity(channels.len() * cfg.features_per_channel());
    for (ch, x) in channels.iter().zip(&epoch.data) {
        let psd = welch_psd(x, fs_hz, cfg.welch.segment_len, cfg.welch.overlap, cfg.welch.window)?;
        for b in &cfg.bands {
            values.push(band_power(&psd, b.low_hz, b.high_hz)?);
        }
        values.push(
            spectral_entropy(&psd).map_err(|e| Error::Data(format!("channel {ch}: {e}")))?,
        );
        values.extend(time_domain_stats(x)?.values());
    }
    Ok(FeatureVector {
        values,
        names: cfg.feature_names(channels),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{synth_generate, SYNTH_CHANNELS};
    use crate::signal::welch::Psd;
    use std::collections::HashSet;

    fn channels() -> Vec<String> {
        SYNTH_CHANNELS.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn four_channels_give_56_features() {
        let eps = synth_generate(1, 512, 256.0, 3).unwrap();
        let cfg = FeatureConfig::default();
        let fv = extract_features(&eps[0], &channels(), 256.0, &cfg).unwrap();
        assert_eq!(fv.len(), 56);
        assert_eq!(fv.names.len(), 56);
        assert_eq!(fv.names.iter().collect::<HashSet<_>>().len(), 56);
        assert_eq!(fv.names[2], "TP9.bandpower.alpha");
        assert_eq!(fv.names[5], "TP9.entropy");
        assert_eq!(fv.names[55], "TP10.hjorth_complexity");
        assert!(fv.values.iter().all(|v| v.is_finite()));
        let again = extract_features(&eps[1], &channels(), 256.0, &cfg).unwrap();
        assert_eq!(again.names, fv.names);
    }

    #[test]
    fn all_zero_epoch_hits_entropy_error() {
        let e = Epoch {
            data: vec![vec![0.0; 256]; 4],
            label: 0,
            source_offset: 0,
        };
        let cfg = FeatureConfig::default();
        let psd: Psd = welch_psd(&e.data[0], 256.0, 256, 0.5, Window::Hann).unwrap();
        for b in &cfg.bands {
            assert_eq!(band_power(&psd, b.low_hz, b.high_hz).unwrap(), 0.0);
        }
        assert_eq!(time_domain_stats(&e.data[0]).unwrap().rms, 0.0);
        assert!(extract_features(&e, &channels(), 256.0, &cfg).is_err());
    }

    #[test]
    fn short_epoch_and_channel_mismatch() {
        let e = Epoch {
            data: vec![vec![1.0; 100]; 4],
            label: 0,
            source_offset: 0,
        };
        assert!(extract_features(&e, &channels(), 256.0, &FeatureConfig::default()).is_err());
        assert!(extract_features(&e, &channels()[..2], 256.0, &FeatureConfig::default()).is_err());
    }
}
