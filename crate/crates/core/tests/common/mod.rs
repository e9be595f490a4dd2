#![allow(dead_code)]

use eeg_gru::dataio::{synth_generate, Dataset, Recording, SYNTH_CHANNELS, SYNTH_CLASS_NAMES};
use eeg_gru::pipeline::{featurize, RunConfig};

pub fn synthetic_recordings(per_class: usize, seed: u64) -> Vec<Recording> {
    let channels: Vec<String> = SYNTH_CHANNELS.iter().map(|s| s.to_string()).collect();
    synth_generate(per_class, 512, 256.0, seed)
        .unwrap()
        .into_iter()
        .map(|e| Recording::new(channels.clone(), 256.0, e.data, Some(e.label)).unwrap())
        .collect()
}

pub fn synthetic_features(per_class: usize, seed: u64) -> Dataset {
    let classes: Vec<String> = SYNTH_CLASS_NAMES.iter().map(|s| s.to_string()).collect();
    let out = featurize(&synthetic_recordings(per_class, seed), &classes, &RunConfig::default()).unwrap();
    assert_eq!(out.rejected, 0);
    out.dataset
}
