//! Welch power spectral density, band power and spectral entropy.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            // Periodic Hann, the usual choice for spectral estimation.
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
            Window::Rectangular => vec![1.0; n],
        }
    }
}

/// One-sided power spectral density in (unit)²/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freqs_hz: Vec<f64>,
    pub power: Vec<f64>,
    pub resolution_hz: f64,
}

impl Psd {
    pub fn max_freq(&self) -> f64 {
        *self.freqs_hz.last().expect("psd is never empty")
    }

    /// Trapezoidal integral over every bin.
    pub fn total_power(&self) -> f64 {
        band_power(self, 0.0, self.max_freq()).expect("full band is never empty")
    }
}

pub fn welch_psd(
    x: &[f64],
    fs_hz: f64,
    segment_len: usize,
    overlap_fraction: f64,
    window: Window,
) -> Result<Psd> {
    if !segment_len.is_power_of_two() || segment_len < 2 {
        return Err(Error::Config(format!("segment length {segment_len} is not a power of two ≥ 2")));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::Config(format!("overlap fraction {overlap_fraction} not in [0, 1)")));
    }
    if !(fs_hz > 0.0) {
        return Err(Error::Config(format!("sample rate {fs_hz} must be positive")));
    }
    if x.len() < segment_len {
        return Err(Error::Data(format!(
            "signal of {} samples is shorter than one {segment_len}-sample segment",
            x.len()
        )));
    }
    let hop = ((segment_len as f64 * (1.0 - overlap_fraction)).round() as usize).max(1);
    let n_segments = (x.len() - segment_len) / hop + 1;
    let win = window.coefficients(segment_len);
    let win_power: f64 = win.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(segment_len);

    let n_bins = segment_len / 2 + 1;
    let mut power = vec![0.0; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    for s in 0..n_segments {
        let seg = &x[s * hop..s * hop + segment_len];
        for ((b, &v), &w) in buf.iter_mut().zip(seg).zip(&win) {
            *b = Complex64::new(v * w, 0.0);
        }
        fft.process(&mut buf);
        for (p, b) in power.iter_mut().zip(&buf) {
            *p += b.norm_sqr();
        }
    }
    let scale = 1.0 / (fs_hz * win_power * n_segments as f64);
    for (k, p) in power.iter_mut().enumerate() {
        *p *= scale;
        // Fold negative frequencies onto the positive side.
        if k != 0 && k != segment_len / 2 {
            *p *= 2.0;
        }
    }
    let resolution_hz = fs_hz / segment_len as f64;
    Ok(Psd {
        freqs_hz: (0..n_bins).map(|k| k as f64 * resolution_hz).collect(),
        power,
        resolution_hz,
    })
}

/// Integral of the piecewise-linear PSD over `[low_hz, high_hz]`.
///
/// Band edges that fall between bins cut the trapezoid at the interpolated
/// value, so powers of adjacent bands add up to the power of their union.
pub fn band_power(psd: &Psd, low_hz: f64, high_hz: f64) -> Result<f64> {
    if !(low_hz >= 0.0 && low_hz < high_hz && high_hz <= psd.max_freq()) {
        return Err(Error::Config(format!(
            "band [{low_hz}, {high_hz}] Hz outside [0, {}] or empty",
            psd.max_freq()
        )));
    }
    if !psd.freqs_hz.iter().any(|&f| f >= low_hz && f <= high_hz) {
        return Err(Error::Data(format!("no PSD bin inside band [{low_hz}, {high_hz}] Hz")));
    }
    let f = &psd.freqs_hz;
    let p = &psd.power;
    let interp = |i: usize, at: f64| p[i] + (p[i + 1] - p[i]) * (at - f[i]) / (f[i + 1] - f[i]);
    let mut total = 0.0;
    for i in 0..f.len() - 1 {
        let a = low_hz.max(f[i]);
        let b = high_hz.min(f[i + 1]);
        if a < b {
            total += 0.5 * (b - a) * (interp(i, a) + interp(i, b));
        }
    }
    Ok(total)
}

/// Shannon entropy (natural log) of the normalised PSD divided by
/// `ln(n_bins)`, in `[0, 1]`.
pub fn spectral_entropy(psd: &Psd) -> Result<f64> {
    let n = psd.power.len();
    if n < 2 {
        return Err(Error::Data("spectral entropy needs at least two bins".into()));
    }
    let total: f64 = psd.power.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Data("spectral entropy of an all-zero spectrum".into()));
    }
    let h: f64 = psd
        .power
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let q = v / total;
            -q * q.ln()
        })
        .sum();
    Ok((h / (n as f64).ln()).clamp(0.0, 1.0))
}
