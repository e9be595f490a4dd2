use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are true classes, columns are predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
    pub class_names: Vec<String>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.n_classes())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// `true\pred` header row followed by one row per true class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\pred");
        for name in &self.class_names {
            write!(out, ",{name}").unwrap();
        }
        out.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.counts) {
            out.push_str(name);
            for c in row {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// `counts[i][j]` = number of examples with truth `i` predicted as `j`.
pub fn confusion(preds: &[usize], truth: &[usize], class_names: &[String]) -> Result<ConfusionMatrix> {
    if preds.len() != truth.len() {
        return Err(Error::dim("confusion matrix (predictions vs labels)", truth.len(), preds.len()));
    }
    let c = class_names.len();
    let mut counts = vec![vec![0u64; c]; c];
    for (k, (&p, &t)) in preds.iter().zip(truth).enumerate() {
        if p >= c || t >= c {
            return Err(Error::Data(format!(
                "example {k}: class id {} out of range for {c} classes",
                p.max(t)
            )));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        class_names: class_names.to_vec(),
    })
}
