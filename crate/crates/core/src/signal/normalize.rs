use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    #[default]
    Zscore,
    Minmax,
}

/// Per-column statistics fitted on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum NormalizationParams {
    /// Constant columns store `std = 1` so they map to 0.
    Zscore { mean: Vec<f64>, std: Vec<f64> },
    /// Constant columns (`max == min`) map to 0.5.
    Minmax { min: Vec<f64>, max: Vec<f64> },
}

impl NormalizationParams {
    pub fn n_features(&self) -> usize {
        match self {
            Self::Zscore { mean, .. } => mean.len(),
            Self::Minmax { min, .. } => min.len(),
        }
    }

    pub fn mode(&self) -> NormMode {
        match self {
            Self::Zscore { .. } => NormMode::Zscore,
            Self::Minmax { .. } => NormMode::Minmax,
        }
    }
}

/// Fitted parameters plus the indices of constant columns, which callers
/// should surface as a warning.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedNormalization {
    pub params: NormalizationParams,
    pub constant_columns: Vec<usize>,
}

pub fn fit_normalization(features: &Array2<f64>, mode: NormMode) -> Result<FittedNormalization> {
    let n = features.nrows();
    if n == 0 {
        return Err(Error::EmptyDataset("cannot fit normalisation on zero rows".into()));
    }
    let mut constant_columns = Vec::new();
    let params = match mode {
        NormMode::Zscore => {
            let mut mean = Vec::with_capacity(features.ncols());
            let mut std = Vec::with_capacity(features.ncols());
            for (j, col) in features.axis_iter(Axis(1)).enumerate() {
                let m = col.iter().sum::<f64>() / n as f64;
                let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
                let s = var.sqrt();
                mean.push(m);
                if s > 0.0 {
                    std.push(s);
                } else {
                    constant_columns.push(j);
                    std.push(1.0);
                }
            }
            NormalizationParams::Zscore { mean, std }
        }
        NormMode::Minmax => {
            let mut min = Vec::with_capacity(features.ncols());
            let mut max = Vec::with_capacity(features.ncols());
            for (j, col) in features.axis_iter(Axis(1)).enumerate() {
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi == lo {
                    constant_columns.push(j);
                }
                min.push(lo);
                max.push(hi);
            }
            NormalizationParams::Minmax { min, max }
        }
    };
    Ok(FittedNormalization {
        params,
        constant_columns,
    })
}

pub fn apply_normalization(features: &Array2<f64>, params: &NormalizationParams) -> Result<Array2<f64>> {
    if features.ncols() != params.n_features() {
        return Err(Error::dim("normalisation feature count", params.n_features(), features.ncols()));
    }
    let mut out = features.clone();
    match params {
        NormalizationParams::Zscore { mean, std } => {
            for mut row in out.rows_mut() {
                for ((v, m), s) in row.iter_mut().zip(mean).zip(std) {
                    *v = (*v - m) / s;
                }
            }
        }
        NormalizationParams::Minmax { min, max } => {
            for mut row in out.rows_mut() {
                for ((v, lo), hi) in row.iter_mut().zip(min).zip(max) {
                    *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.5 };
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn zscore_closed_form() {
        let x = array![[1.0], [2.0], [3.0]];
        let p = fit_normalization(&x, NormMode::Zscore).unwrap();
        let y = apply_normalization(&x, &p.params).unwrap();
        let expect = [-1.224_744_871_391_589, 0.0, 1.224_744_871_391_589];
        for (a, b) in y.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn minmax_closed_form() {
        let x = array![[1.0], [2.0], [3.0]];
        let p = fit_normalization(&x, NormMode::Minmax).unwrap();
        let y = apply_normalization(&x, &p.params).unwrap();
        assert_eq!(y.column(0).to_vec(), [0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_columns() {
        let x = array![[5.0, 1.0], [5.0, 2.0]];
        let z = fit_normalization(&x, NormMode::Zscore).unwrap();
        assert_eq!(z.constant_columns, [0]);
        assert_eq!(apply_normalization(&x, &z.params).unwrap().column(0).to_vec(), [0.0, 0.0]);
        let m = fit_normalization(&x, NormMode::Minmax).unwrap();
        assert_eq!(m.constant_columns, [0]);
        assert_eq!(apply_normalization(&x, &m.params).unwrap().column(0).to_vec(), [0.5, 0.5]);
    }

    #[test]
    fn column_mismatch() {
        let p = fit_normalization(&array![[1.0, 2.0]], NormMode::Zscore).unwrap();
        assert!(apply_normalization(&array![[1.0]], &p.params).is_err());
    }

    #[test]
    fn train_fit_does_not_center_other_rows() {
        let train = array![[1.0, 10.0], [2.0, 20.0], [4.0, 25.0]];
        let val = array![[3.0, 12.0], [7.0, 30.0]];
        let p = fit_normalization(&train, NormMode::Zscore).unwrap();
        let v = apply_normalization(&val, &p.params).unwrap();
        for col in v.columns() {
            assert!(col.mean().unwrap().abs() > 1e-3);
        }
    }

    #[test]
    fn params_serde_roundtrip() {
        let p = fit_normalization(&array![[1.0, 3.0], [2.5, -1.0]], NormMode::Minmax).unwrap();
        let s = serde_json::to_string(&p.params).unwrap();
        let back: NormalizationParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p.params);
    }

    proptest! {
        #[test]
        fn standardisation_is_idempotent(
            rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 3), 3..30),
        ) {
            let x = Array2::from_shape_vec((rows.len(), 3), rows.concat()).unwrap();
            let p = fit_normalization(&x, NormMode::Zscore).unwrap();
            prop_assume!(p.constant_columns.is_empty());
            let y = apply_normalization(&x, &p.params).unwrap();
            let refit = fit_normalization(&y, NormMode::Zscore).unwrap();
            let NormalizationParams::Zscore { mean, std } = refit.params else { unreachable!() };
            // Columns with tiny spread relative to their offset lose precision.
            let spread_ok = |j: usize| {
                let col = x.column(j);
                let s = col.std(0.0);
                s > 1e-3 * col.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            };
            for j in (0..3).filter(|&j| spread_ok(j)) {
                prop_assert!(mean[j].abs() < 1e-9);
                prop_assert!((std[j] - 1.0).abs() < 1e-9);
            }
            let mm = fit_normalization(&x, NormMode::Minmax).unwrap();
            let ym = apply_normalization(&x, &mm.params).unwrap();
            prop_assert!(ym.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
