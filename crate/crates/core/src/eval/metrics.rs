use serde::{Deserialize, Serialize};

use super::ConfusionMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Nothing was predicted as this class; precision reported as 0.
    pub precision_undefined: bool,
    /// The class has no true examples; recall reported as 0.
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub total: u64,
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 || cm.n_classes() == 0 {
        return Err(Error::EmptyDataset("confusion matrix has no examples".into()));
    }
    let rows = cm.row_sums();
    let cols = cm.col_sums();
    let per_class: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let tp = cm.counts[c][c];
            let (precision, precision_undefined) = ratio(tp, cols[c]);
            let (recall, recall_undefined) = ratio(tp, rows[c]);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                name: cm.class_names[c].clone(),
                precision,
                recall,
                f1,
                support: rows[c],
                precision_undefined,
                recall_undefined,
            }
        })
        .collect();
    let k = per_class.len() as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / k;
    Ok(MetricsReport {
        accuracy: cm.trace() as f64 / total as f64,
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        total,
        per_class,
    })
}
