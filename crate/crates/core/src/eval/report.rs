use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::MetricsReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Rows sorted by descending accuracy; equal accuracies keep input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub const COMPARISON_HEADER: &str = "model,accuracy,macro_precision,macro_recall,macro_f1";

pub fn compare_report(results: &[(String, MetricsReport)]) -> ComparisonTable {
    let mut rows: Vec<ComparisonRow> = results
        .iter()
        .map(|(name, m)| ComparisonRow {
            model: name.clone(),
            accuracy: m.accuracy,
            macro_precision: m.macro_precision,
            macro_recall: m.macro_recall,
            macro_f1: m.macro_f1,
        })
        .collect();
    rows.sort_by(|a, b| b.accuracy.total_cmp(&a.accuracy));
    ComparisonTable { rows }
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{COMPARISON_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.model, r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1
            )
            .unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> crate::Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows = reader
            .deserialize()
            .collect::<Result<Vec<ComparisonRow>, _>>()
            .map_err(|e| crate::Error::Data(format!("comparison table: {e}")))?;
        Ok(Self { rows })
    }

    /// Fixed-width text table with accuracies as percentages.
    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.model.len()).max().unwrap_or(0).max(5);
        let mut out = format!(
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>9}\n",
            "model", "accuracy", "precision", "recall", "f1"
        );
        writeln!(out, "{}", "-".repeat(width + 4 * 11)).unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<width$}  {:>8.2}%  {:>9.4}  {:>9.4}  {:>9.4}",
                r.model,
                100.0 * r.accuracy,
                r.macro_precision,
                r.macro_recall,
                r.macro_f1
            )
            .unwrap();
        }
        out
    }
}
