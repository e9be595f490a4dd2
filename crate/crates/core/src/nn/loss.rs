use ndarray::Array1;

/// Numerically stable softmax.
pub fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let m = logits.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let e = logits.mapv(|v| (v - m).exp());
    let s = e.sum();
    e / s
}

/// Cross-entropy of `softmax(logits)` against `label` and its gradient
/// `softmax(logits) - one_hot(label)`.
pub fn softmax_cross_entropy(logits: &Array1<f64>, label: usize) -> (f64, Array1<f64>) {
    assert!(label < logits.len(), "label {label} out of range for {} classes", logits.len());
    let m = logits.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let sum_exp: f64 = logits.iter().map(|v| (v - m).exp()).sum();
    let lse = m + sum_exp.ln();
    let loss = lse - logits[label];
    let mut grad = logits.mapv(|v| (v - lse).exp());
    grad[label] -= 1.0;
    (loss.max(0.0), grad)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(v: &Array1<f64>) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
