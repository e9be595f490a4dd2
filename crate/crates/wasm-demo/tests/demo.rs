use eeg_gru_wasm::{filter_response, synth_spectrum, train_toy};

/// |H| of a band-pass with `order` poles via the analogue prototype at the
/// pre-warped frequency.
fn analytic_gain(f: f64, low: f64, high: f64, fs: f64, order: usize) -> f64 {
    let warp = |x: f64| 2.0 * fs * (std::f64::consts::PI * x / fs).tan();
    let (wl, wh, w) = (warp(low), warp(high), warp(f));
    let omega = (w * w - wl * wh) / (w * (wh - wl));
    1.0 / (1.0 + omega.abs().powi(order as i32)).sqrt()
}

#[test]
fn filter_response_matches_analogue_prototype() {
    let r = filter_response(0.5, 45.0, 256.0, 4, 257).unwrap();
    assert_eq!(r.sections, 2);
    assert!(r.stable);
    assert_eq!(r.freqs_hz.len(), 257);
    assert_eq!(r.freqs_hz[256], 128.0);
    for (&f, &m) in r.freqs_hz.iter().zip(&r.magnitude).skip(1).take(255) {
        let want = analytic_gain(f, 0.5, 45.0, 256.0, 4);
        assert!((m - want).abs() < 1e-6, "f={f}: {m} vs {want}");
    }
}

#[test]
fn filter_response_rejects_bad_band() {
    assert!(filter_response(50.0, 10.0, 256.0, 4, 64).is_err());
    assert!(filter_response(1.0, 200.0, 256.0, 4, 64).is_err());
}

#[test]
fn spectrum_band_powers_integrate_the_psd() {
    let r = synth_spectrum(1, 7).unwrap();
    assert_eq!(r.raw.len(), r.filtered.len());
    let on_grid = |hz: f64| r.freqs_hz.contains(&hz);
    assert!(r.bands.iter().filter(|b| on_grid(b.low_hz) && on_grid(b.high_hz)).count() >= 3);
    for b in r.bands.iter().filter(|b| on_grid(b.low_hz) && on_grid(b.high_hz)) {
        let pts: Vec<(f64, f64)> = r
            .freqs_hz
            .iter()
            .zip(&r.power)
            .filter(|(f, _)| **f >= b.low_hz && **f <= b.high_hz)
            .map(|(f, p)| (*f, *p))
            .collect();
        let trapz: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
        assert!((b.power - trapz).abs() <= 1e-9 * trapz.max(1.0), "{}: {} vs {trapz}", b.name, b.power);
    }
    let power = |n: &str| r.bands.iter().find(|b| b.name == n).unwrap().power;
    assert!(power("alpha") > power("beta"));
    assert!(synth_spectrum(3, 7).is_err());
}

#[test]
fn toy_training_is_deterministic_and_learns() {
    let a = train_toy(20, 8, 60, 0.01, 5).unwrap();
    let b = train_toy(20, 8, 60, 0.01, 5).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.class_names.len(), 3);
    let total: u64 = a.confusion.iter().flatten().sum();
    let trace: u64 = (0..3).map(|i| a.confusion[i][i]).sum();
    assert_eq!(a.test_accuracy, trace as f64 / total as f64);
    assert!(a.test_accuracy >= 0.8, "{}", a.test_accuracy);
    assert!(a.train_loss.last().unwrap() < &a.train_loss[0]);
    assert!(train_toy(20, 0, 10, 0.01, 5).is_err());
}
