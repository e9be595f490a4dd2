//! Butterworth band-pass design (bilinear transform with pre-warping) and
//! zero-phase second-order-section filtering.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One biquad, `H(z) = (b0 + b1 z⁻¹ + b2 z⁻²) / (1 + a1 z⁻¹ + a2 z⁻²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sos {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Sos {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        let num = self.b0 + z_inv * self.b1 + z2 * self.b2;
        let den = 1.0 + z_inv * self.a1 + z2 * self.a2;
        num / den
    }

    /// Roots of `z² + a1 z + a2`.
    pub fn poles(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        [(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    /// Transposed direct-form II state reached after a unit step has settled.
    fn step_state(&self) -> [f64; 2] {
        let gain = (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2);
        let s2 = self.b2 - self.a2 * gain;
        let s1 = self.b1 - self.a1 * gain + s2;
        [s1, s2]
    }

    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoefficients {
    pub sections: Vec<Sos>,
    /// Band-pass order (number of poles).
    pub order: usize,
    pub low_hz: f64,
    pub high_hz: f64,
    pub fs_hz: f64,
}

pub const SUPPORTED_ORDERS: [usize; 4] = [2, 4, 6, 8];

/// Designs a digital Butterworth band-pass of the given (even) order as
/// `order / 2` second-order sections.
pub fn design_butterworth_bandpass(
    low_hz: f64,
    high_hz: f64,
    fs_hz: f64,
    order: usize,
) -> Result<FilterCoefficients> {
    if !(fs_hz > 0.0 && low_hz > 0.0 && low_hz < high_hz && high_hz < fs_hz / 2.0) {
        return Err(Error::Config(format!(
            "band edges must satisfy 0 < low < high < fs/2 (got {low_hz}, {high_hz}, fs {fs_hz})"
        )));
    }
    if !SUPPORTED_ORDERS.contains(&order) {
        return Err(Error::Config(format!(
            "unsupported band-pass order {order}; expected one of {SUPPORTED_ORDERS:?}"
        )));
    }
    let n = order / 2;
    let fs2 = 2.0 * fs_hz;
    let warp = |f: f64| fs2 * (PI * f / fs_hz).tan();
    let (w1, w2) = (warp(low_hz), warp(high_hz));
    let bw = w2 - w1;
    let w0_sq = w1 * w2;

    // Analog low-pass prototype poles, then low-pass → band-pass.
    let mut analog = Vec::with_capacity(2 * n);
    for k in 0..n {
        let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
        let p = Complex64::from_polar(1.0, theta) * (bw / 2.0);
        let d = (p * p - w0_sq).sqrt();
        analog.push(p + d);
        analog.push(p - d);
    }

    // Bilinear transform. n zeros at s = 0 map to z = 1, n zeros at ∞ to z = -1.
    let digital: Vec<Complex64> = analog.iter().map(|&p| (fs2 + p) / (fs2 - p)).collect();
    let denom: Complex64 = analog.iter().map(|&p| fs2 - p).product();
    let gain = (Complex64::new(bw.powi(n as i32) * fs2.powi(n as i32), 0.0) / denom).re;

    let sections = pair_poles(&digital)
        .into_iter()
        .enumerate()
        .map(|(i, (a1, a2))| Sos {
            b0: if i == 0 { gain } else { 1.0 },
            b1: 0.0,
            b2: if i == 0 { -gain } else { -1.0 },
            a1,
            a2,
        })
        .collect::<Vec<_>>();

    if let Some(bad) = sections.iter().find(|s| !s.is_stable()) {
        return Err(Error::Numeric(format!("designed section is unstable: {bad:?}")));
    }
    Ok(FilterCoefficients {
        sections,
        order,
        low_hz,
        high_hz,
        fs_hz,
    })
}

/// Groups poles into conjugate pairs (or pairs of real poles) and returns
/// the `(a1, a2)` denominator of each.
fn pair_poles(poles: &[Complex64]) -> Vec<(f64, f64)> {
    const TOL: f64 = 1e-12;
    let mut out = Vec::new();
    let mut reals = Vec::new();
    for &p in poles {
        if p.im > TOL {
            out.push((-2.0 * p.re, p.norm_sqr()));
        } else if p.im.abs() <= TOL {
            reals.push(p.re);
        }
    }
    reals.sort_by(f64::total_cmp);
    for pair in reals.chunks(2) {
        out.push((-(pair[0] + pair[1]), pair[0] * pair[1]));
    }
    out
}

impl FilterCoefficients {
    /// `|H(e^{j2πf/fs})|` of the cascade.
    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        let z_inv = Complex64::from_polar(1.0, -2.0 * PI * freq_hz / self.fs_hz);
        self.sections
            .iter()
            .map(|s| s.response(z_inv))
            .product::<Complex64>()
            .norm()
    }

    /// Minimum input length accepted by [`filtfilt`].
    pub fn pad_len(&self) -> usize {
        3 * self.order
    }

    /// Causal filtering starting from the steady state of a step of height
    /// `x[0]`, so a constant input passes through without a transient.
    fn sosfilt_steady(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        let mut scale = x[0];
        for s in &self.sections {
            let [z1, z2] = s.step_state();
            let (mut s1, mut s2) = (z1 * scale, z2 * scale);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b0 * input + s1;
                s1 = s.b1 * input - s.a1 * out + s2;
                s2 = s.b2 * input - s.a2 * out;
                *v = out;
            }
            scale *= s.dc_gain();
        }
        y
    }

    fn forward_backward(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.sosfilt_steady(x);
        y.reverse();
        let mut y = self.sosfilt_steady(&y);
        y.reverse();
        y
    }
}

/// Zero-phase band-pass filtering with odd-reflection edge padding.
///
/// The result is the mean of the forward-backward and backward-forward
/// passes, which makes the operator exactly commute with time reversal.
pub fn filtfilt(coeffs: &FilterCoefficients, x: &[f64]) -> Result<Vec<f64>> {
    let pad = coeffs.pad_len();
    if x.len() <= pad {
        return Err(Error::Data(format!(
            "signal of {} samples is too short to filter; need more than {pad}",
            x.len()
        )));
    }
    let n = x.len();
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    let fb = coeffs.forward_backward(&ext);
    let mut rev = ext;
    rev.reverse();
    let mut bf = coeffs.forward_backward(&rev);
    bf.reverse();

    Ok(fb[pad..pad + n]
        .iter()
        .zip(&bf[pad..pad + n])
        .map(|(a, b)| 0.5 * (a + b))
        .collect())
}
