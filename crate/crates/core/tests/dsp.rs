mod common;

use std::f64::consts::PI;

use eeg_gru::dataio::synth_generate;
use eeg_gru::signal::{
    band_power, design_butterworth_bandpass, filtfilt, spectral_entropy, welch_psd, Psd, Window,
};
use eeg_gru::rng::rng_from_seed;
use rand::Rng as _;

/// Analytic magnitude of the bilinear-transformed band-pass with `order`
/// poles: the low-pass prototype of order `order/2` evaluated at the
/// band-pass frequency map of the pre-warped analog frequency.
fn analytic_magnitude(f: f64, low: f64, high: f64, fs: f64, order: usize) -> f64 {
    let warp = |hz: f64| 2.0 * fs * (PI * hz / fs).tan();
    let (w1, w2, w) = (warp(low), warp(high), warp(f));
    if w == 0.0 {
        return 0.0;
    }
    let x = (w * w - w1 * w2) / (w * (w2 - w1));
    1.0 / (1.0 + x.abs().powi(order as i32)).sqrt()
}

#[test]
fn butterworth_matches_analytic_response() {
    let (low, high, fs) = (0.5, 45.0, 256.0);
    for order in [2, 4, 6, 8] {
        let c = design_butterworth_bandpass(low, high, fs, order).unwrap();
        for k in 1..=100 {
            let f = k as f64 * (fs / 2.0) / 101.0;
            let err = (c.magnitude(f) - analytic_magnitude(f, low, high, fs, order)).abs();
            assert!(err < 1e-6, "order {order}, {f} Hz: {err}");
        }
    }
    let c = design_butterworth_bandpass(low, high, fs, 4).unwrap();
    assert!(c.magnitude(0.0) < 1e-12);
    for edge in [low, high] {
        assert!((c.magnitude(edge) - 0.5f64.sqrt()).abs() < 1e-3);
    }
    assert!(c.magnitude((low * high).sqrt()) >= 0.99);
}

#[test]
fn filtfilt_sine_amplitude_and_lag() {
    let fs = 256.0;
    let c = design_butterworth_bandpass(0.5, 45.0, fs, 4).unwrap();
    let x: Vec<f64> = (0..2048).map(|i| (2.0 * PI * 10.0 * i as f64 / fs).sin()).collect();
    let y = filtfilt(&c, &x).unwrap();
    let mid = &y[768..1280];
    let amp = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((amp - 1.0).abs() < 0.02, "amplitude {amp}");
    let xcorr = |lag: i64| -> f64 {
        (768..1280)
            .map(|i| x[i] * y[(i as i64 + lag) as usize])
            .sum()
    };
    let best = (-12..=12).max_by(|&a, &b| xcorr(a).total_cmp(&xcorr(b))).unwrap();
    assert_eq!(best, 0);
}

#[test]
fn periodogram_matches_naive_dft() {
    let mut rng = rng_from_seed(11);
    let n = 64;
    let fs = 128.0;
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let psd = welch_psd(&x, fs, n, 0.0, Window::Rectangular).unwrap();
    assert_eq!(psd.power.len(), n / 2 + 1);
    for k in 0..=n / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in x.iter().enumerate() {
            let a = -2.0 * PI * (k * t) as f64 / n as f64;
            re += v * a.cos();
            im += v * a.sin();
        }
        let one_sided = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
        let want = one_sided * (re * re + im * im) / (fs * n as f64);
        assert!((psd.power[k] - want).abs() <= 1e-9 * want.max(1e-12), "bin {k}");
    }
    let sum: f64 = psd.power.iter().sum::<f64>() * psd.resolution_hz;
    let mean_sq = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
    assert!((sum - mean_sq).abs() / mean_sq < 1e-9);
}

#[test]
fn entropy_closed_forms() {
    let psd = |power: Vec<f64>| Psd {
        freqs_hz: (0..power.len()).map(|i| i as f64).collect(),
        power,
        resolution_hz: 1.0,
    };
    assert_eq!(spectral_entropy(&psd(vec![2.0; 8])).unwrap(), 1.0);
    assert_eq!(spectral_entropy(&psd(vec![0.0, 3.0, 0.0, 0.0])).unwrap(), 0.0);
    assert_eq!(spectral_entropy(&psd(vec![0.0, 1.5, 1.5, 0.0])).unwrap(), 0.5);
    assert!(spectral_entropy(&psd(vec![0.0; 4])).is_err());
}

#[test]
fn synthetic_alpha_class_dominates_beta() {
    let epochs = synth_generate(20, 512, 256.0, 9).unwrap();
    let mut checked = 0;
    for e in epochs.iter().filter(|e| e.label == 1) {
        for ch in &e.data {
            let psd = welch_psd(ch, 256.0, 256, 0.5, Window::Hann).unwrap();
            let alpha = band_power(&psd, 8.0, 13.0).unwrap();
            let beta = band_power(&psd, 13.0, 30.0).unwrap();
            assert!(alpha > beta, "alpha {alpha} vs beta {beta}");
            checked += 1;
        }
    }
    assert_eq!(checked, 80);
}

#[test]
fn featurized_synthetic_set_shape() {
    let ds = common::synthetic_features(5, 3);
    assert_eq!(ds.n_examples(), 15);
    assert_eq!(ds.n_features(), 56);
    assert_eq!(ds.class_counts(), vec![5, 5, 5]);
}
