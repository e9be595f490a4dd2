use super::{Epoch, Recording};
use crate::error::{Error, Result};

/// Cuts `rec` into epochs at offsets `0, hop, 2·hop, …` while the window fits.
pub fn window_recording(rec: &Recording, window_len: usize, hop: usize) -> Result<Vec<Epoch>> {
    if window_len == 0 || hop == 0 {
        return Err(Error::Config(format!(
            "window_len and hop must be ≥ 1 (got {window_len}, {hop})"
        )));
    }
    let label = rec
        .label()
        .ok_or_else(|| Error::Data("cannot window an unlabeled recording".into()))?;
    let n = rec.n_samples();
    if window_len > n {
        return Ok(Vec::new());
    }
    Ok((0..=n - window_len)
        .step_by(hop)
        .map(|offset| Epoch {
            data: rec
                .data()
                .iter()
                .map(|ch| ch[offset..offset + window_len].to_vec())
                .collect(),
            label,
            source_offset: offset,
        })
        .collect())
}
