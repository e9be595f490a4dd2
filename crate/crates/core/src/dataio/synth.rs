use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::Epoch;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const SYNTH_CHANNELS: [&str; 4] = ["TP9", "AF7", "AF8", "TP10"];

/// Class names in id order; already lexicographic so ids survive a CSV
/// round trip.
pub const SYNTH_CLASS_NAMES: [&str; 3] = ["NEGATIVE", "NEUTRAL", "POSITIVE"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthBand {
    pub low_hz: f64,
    pub high_hz: f64,
}

/// Oscillation band of each synthetic class.
pub const SYNTH_BANDS: [SynthBand; 3] = [
    SynthBand { low_hz: 4.0, high_hz: 7.0 },
    SynthBand { low_hz: 10.0, high_hz: 12.0 },
    SynthBand { low_hz: 20.0, high_hz: 25.0 },
];

const SINE_AMPLITUDE: f64 = 3.0;

/// Three-class EEG-like epochs: unit white noise plus an amplitude-3 sinusoid
/// whose frequency is drawn from the class band. Each epoch has its own
/// frequency; each channel its own phase. Epochs are ordered by class.
pub fn synth_generate(n_per_class: usize, window_len: usize, fs: f64, seed: u64) -> Result<Vec<Epoch>> {
    if n_per_class == 0 {
        return Err(Error::Config("n_per_class must be ≥ 1".into()));
    }
    if window_len == 0 || !(fs > 0.0) {
        return Err(Error::Config("window_len and sample rate must be positive".into()));
    }
    if let Some(b) = SYNTH_BANDS.iter().find(|b| b.high_hz >= fs / 2.0) {
        return Err(Error::Config(format!(
            "sample rate {fs} Hz cannot represent the {}–{} Hz class band",
            b.low_hz, b.high_hz
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut epochs = Vec::with_capacity(n_per_class * SYNTH_BANDS.len());
    for (label, band) in SYNTH_BANDS.iter().enumerate() {
        for _ in 0..n_per_class {
            let freq = rng.random_range(band.low_hz..band.high_hz);
            let data = SYNTH_CHANNELS
                .iter()
                .map(|_| {
                    let phase = rng.random_range(0.0..2.0 * PI);
                    (0..window_len)
                        .map(|i| {
                            let t = i as f64 / fs;
                            let noise: f64 = StandardNormal.sample(&mut rng);
                            SINE_AMPLITUDE * (2.0 * PI * freq * t + phase).sin() + noise
                        })
                        .collect()
                })
                .collect();
            epochs.push(Epoch {
                data,
                label,
                source_offset: 0,
            });
        }
    }
    Ok(epochs)
}
