//! Confusion matrices, metrics, comparison tables and training curves.

mod confusion;
mod curves;
mod metrics;
mod report;

pub use confusion::{confusion, ConfusionMatrix};
pub use curves::{curves_svg, emit_curves};
pub use metrics::{metrics, ClassMetrics, MetricsReport};
pub use report::{compare_report, ComparisonRow, ComparisonTable, COMPARISON_HEADER};
