use crate::dataio::Epoch;

/// Keeps epochs whose peak absolute amplitude over all channels is at most
/// `peak_uv`, preserving order. Returns the kept epochs and how many were
/// dropped.
pub fn reject_artifacts(epochs: Vec<Epoch>, peak_uv: f64) -> (Vec<Epoch>, usize) {
    let before = epochs.len();
    let kept: Vec<Epoch> = epochs.into_iter().filter(|e| e.peak_abs() <= peak_uv).collect();
    let rejected = before - kept.len();
    (kept, rejected)
}
