//! Browser bindings for three interactive views of the pipeline: the band-pass
//! response, the spectrum of a synthetic epoch and a small GRU training run.
//!
//! Each export returns a JSON string; the plain functions underneath are
//! ordinary Rust so they can be tested natively.

use eeg_gru::dataio::{synth_generate, Recording, SYNTH_CHANNELS, SYNTH_CLASS_NAMES};
use eeg_gru::pipeline::{self, RunConfig};
use eeg_gru::signal::{band_power, default_bands, design_butterworth_bandpass, filtfilt, welch_psd, Window};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct FilterResponse {
    pub freqs_hz: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub sections: usize,
    pub stable: bool,
}

pub fn filter_response(low_hz: f64, high_hz: f64, fs_hz: f64, order: usize, points: usize) -> Result<FilterResponse, String> {
    let c = design_butterworth_bandpass(low_hz, high_hz, fs_hz, order).map_err(|e| e.to_string())?;
    let points = points.clamp(2, 4096);
    let freqs_hz: Vec<f64> = (0..points).map(|i| i as f64 * (fs_hz / 2.0) / (points - 1) as f64).collect();
    Ok(FilterResponse {
        magnitude: freqs_hz.iter().map(|&f| c.magnitude(f)).collect(),
        freqs_hz,
        sections: c.sections.len(),
        stable: c.sections.iter().all(|s| s.is_stable()),
    })
}

#[derive(Debug, Serialize)]
pub struct BandPower {
    pub name: String,
    pub low_hz: f64,
    pub high_hz: f64,
    pub power: f64,
}

#[derive(Debug, Serialize)]
pub struct Spectrum {
    pub class_name: String,
    pub channel: String,
    pub raw: Vec<f64>,
    pub filtered: Vec<f64>,
    pub freqs_hz: Vec<f64>,
    pub power: Vec<f64>,
    pub bands: Vec<BandPower>,
}

/// One synthetic epoch of class `class_id`, band-pass filtered, with its
/// Welch PSD and standard band powers for the first channel.
pub fn synth_spectrum(class_id: usize, seed: u64) -> Result<Spectrum, String> {
    if class_id >= SYNTH_CLASS_NAMES.len() {
        return Err(format!("class id must be below {}", SYNTH_CLASS_NAMES.len()));
    }
    let cfg = RunConfig::default();
    let fs = cfg.synth.sample_rate_hz;
    let epochs = synth_generate(1, cfg.synth.window_len, fs, seed).map_err(|e| e.to_string())?;
    let raw = epochs[class_id].data[0].clone();
    let f = &cfg.signal.filter;
    let coeffs = design_butterworth_bandpass(f.low_hz, f.high_hz, fs, f.order).map_err(|e| e.to_string())?;
    let filtered = filtfilt(&coeffs, &raw).map_err(|e| e.to_string())?;
    let w = &cfg.signal.features.welch;
    let psd = welch_psd(&filtered, fs, w.segment_len, w.overlap, Window::Hann).map_err(|e| e.to_string())?;
    let bands = default_bands()
        .into_iter()
        .map(|b| {
            let power = band_power(&psd, b.low_hz, b.high_hz).map_err(|e| e.to_string())?;
            Ok(BandPower {
                name: b.name,
                low_hz: b.low_hz,
                high_hz: b.high_hz,
                power,
            })
        })
        .collect::<Result<_, String>>()?;
    Ok(Spectrum {
        class_name: SYNTH_CLASS_NAMES[class_id].to_string(),
        channel: SYNTH_CHANNELS[0].to_string(),
        raw,
        filtered,
        freqs_hz: psd.freqs_hz,
        power: psd.power,
        bands,
    })
}

#[derive(Debug, Serialize)]
pub struct TrainingRun {
    pub train_loss: Vec<f64>,
    pub train_acc: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub val_acc: Vec<f64>,
    pub test_accuracy: f64,
    pub confusion: Vec<Vec<u64>>,
    pub class_names: Vec<String>,
}

/// Synthesise, featurise, split and train a GRU; report curves and the test
/// confusion matrix.
pub fn train_toy(per_class: usize, hidden: usize, epochs: usize, learning_rate: f64, seed: u64) -> Result<TrainingRun, String> {
    let mut cfg = RunConfig {
        seed,
        ..RunConfig::default()
    };
    cfg.gru.hidden_dim = hidden;
    cfg.train.max_epochs = epochs;
    cfg.train.learning_rate = learning_rate;
    cfg.validate().map_err(|e| e.to_string())?;

    let fs = cfg.synth.sample_rate_hz;
    let channels: Vec<String> = SYNTH_CHANNELS.iter().map(|c| c.to_string()).collect();
    let recordings = synth_generate(per_class, cfg.synth.window_len, fs, cfg.sub_seed("synth"))
        .and_then(|eps| {
            eps.into_iter()
                .map(|e| Recording::new(channels.clone(), fs, e.data, Some(e.label)))
                .collect::<eeg_gru::Result<Vec<_>>>()
        })
        .map_err(|e| e.to_string())?;
    let class_names: Vec<String> = SYNTH_CLASS_NAMES.iter().map(|c| c.to_string()).collect();
    let run = || -> eeg_gru::Result<TrainingRun> {
        let feats = pipeline::featurize(&recordings, &class_names, &cfg)?;
        let (train, val, test) = pipeline::split(&feats.dataset, &cfg)?;
        let (ck, h) = pipeline::train_gru(&train, &val, &cfg, None)?;
        let (cm, m) = pipeline::evaluate_checkpoint(&ck, &test)?;
        Ok(TrainingRun {
            train_loss: h.train_loss,
            train_acc: h.train_acc,
            val_loss: h.val_loss,
            val_acc: h.val_acc,
            test_accuracy: m.accuracy,
            confusion: cm.counts,
            class_names: cm.class_names,
        })
    };
    run().map_err(|e| e.to_string())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = filterResponse)]
pub fn filter_response_js(low_hz: f64, high_hz: f64, fs_hz: f64, order: usize, points: usize) -> Result<String, JsValue> {
    to_js(filter_response(low_hz, high_hz, fs_hz, order, points))
}

#[wasm_bindgen(js_name = synthSpectrum)]
pub fn synth_spectrum_js(class_id: usize, seed: u64) -> Result<String, JsValue> {
    to_js(synth_spectrum(class_id, seed))
}

#[wasm_bindgen(js_name = trainToy)]
pub fn train_toy_js(per_class: usize, hidden: usize, epochs: usize, learning_rate: f64, seed: u64) -> Result<String, JsValue> {
    to_js(train_toy(per_class, hidden, epochs, learning_rate, seed))
}
