use super::model::{ModelParams, Parameters};
use crate::error::{Error, Result};
use ndarray::Array1;

/// Smallest denominator used for relative errors; gradients below it are
/// compared in absolute terms.
pub const REL_ERROR_FLOOR: f64 = 1e-6;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_ERROR_FLOOR)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// `tensor[index]` of the worst parameter.
    pub worst_param: String,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    pub n_checked: usize,
    /// Largest magnitude seen on either side, for saturation checks.
    pub max_abs_grad: f64,
}

/// Central-difference check of every scalar parameter of the full
/// GRU → flatten → dense → cross-entropy pipeline on one example.
pub fn gradient_check(params: &ModelParams, xs: &[Array1<f64>], label: usize, eps: f64) -> Result<GradCheckReport> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::Config(format!("finite-difference step {eps} outside [1e-7, 1e-3]")));
    }
    let (_, analytic) = params.loss_and_grad(xs, label)?;
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_param: String::new(),
        worst_analytic: 0.0,
        worst_numeric: 0.0,
        n_checked: 0,
        max_abs_grad: 0.0,
    };
    let analytic_tensors: Vec<Vec<f64>> = analytic.tensors().iter().map(|(_, t)| t.to_vec()).collect();
    let names: Vec<&str> = analytic.tensors().iter().map(|(n, _)| *n).collect();

    for (k, name) in names.iter().enumerate() {
        for i in 0..analytic_tensors[k].len() {
            let original = probe.tensors()[k].1[i];
            probe.tensors_mut()[k].1[i] = original + eps;
            let plus = probe.loss(xs, label)?;
            probe.tensors_mut()[k].1[i] = original - eps;
            let minus = probe.loss(xs, label)?;
            probe.tensors_mut()[k].1[i] = original;

            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic_tensors[k][i];
            let err = relative_error(a, numeric);
            report.n_checked += 1;
            report.max_abs_grad = report.max_abs_grad.max(a.abs()).max(numeric.abs());
            if err > report.max_rel_error || report.worst_param.is_empty() {
                report.max_rel_error = err;
                report.worst_param = format!("{name}[{i}]");
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    Ok(report)
}
