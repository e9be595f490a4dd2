//! Time-domain statistics. Variances are population variances throughout.

use super::FeatureVector;
use crate::error::{Error, Result};

/// Names of the emitted statistics, in emission order.
pub const TIME_STAT_NAMES: [&str; 8] = [
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "rms",
    "zero_crossings",
    "hjorth_mobility",
    "hjorth_complexity",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    /// Excess kurtosis.
    pub kurtosis: f64,
    pub rms: f64,
    pub zero_crossings: usize,
    pub hjorth_mobility: f64,
    pub hjorth_complexity: f64,
    /// Set when a shape statistic was undefined (zero variance of the signal
    /// or of its derivative) and reported as 0.
    pub degenerate: bool,
}

impl TimeStats {
    pub fn values(&self) -> [f64; 8] {
        [
            self.mean,
            self.variance,
            self.skewness,
            self.kurtosis,
            self.rms,
            self.zero_crossings as f64,
            self.hjorth_mobility,
            self.hjorth_complexity,
        ]
    }

    pub fn to_feature_vector(&self) -> FeatureVector {
        FeatureVector {
            values: self.values().to_vec(),
            names: TIME_STAT_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn time_domain_stats(x: &[f64]) -> Result<TimeStats> {
    if x.len() < 2 {
        return Err(Error::Data(format!("time-domain statistics need ≥ 2 samples, got {}", x.len())));
    }
    let n = x.len() as f64;
    let m = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let zero_crossings = x.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();

    let mut degenerate = false;
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        degenerate = true;
        (0.0, 0.0)
    };

    let dx = diff(x);
    let var_dx = variance(&dx);
    let mobility = if m2 > 0.0 {
        (var_dx / m2).sqrt()
    } else {
        degenerate = true;
        0.0
    };
    let complexity = if dx.len() >= 2 && var_dx > 0.0 && mobility > 0.0 {
        let ddx = diff(&dx);
        (variance(&ddx) / var_dx).sqrt() / mobility
    } else {
        degenerate = true;
        0.0
    };

    Ok(TimeStats {
        mean: m,
        variance: m2,
        skewness,
        kurtosis,
        rms,
        zero_crossings,
        hjorth_mobility: mobility,
        hjorth_complexity: complexity,
        degenerate,
    })
}
