use std::collections::BTreeSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Recording;
use crate::error::{Error, Result};

/// Muse headband sample rate; used when generating data, never assumed on read.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 256.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub file: String,
    /// Empty string means unlabeled.
    pub label: String,
    pub sample_rate_hz: f64,
    /// `;`-separated on disk.
    pub channels: String,
}

impl ManifestRow {
    pub fn channel_list(&self) -> Vec<String> {
        self.channels
            .split(';')
            .map(|c| c.trim().to_owned())
            .filter(|c| !c.is_empty())
            .collect()
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| Error::Csv {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut out = String::from("file,label,sample_rate_hz,channels\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.file, r.label, r.sample_rate_hz, r.channels));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads every recording listed in `manifest`, resolving file names against
/// `dir`. Returns the recordings and the class-name table (labels sorted
/// lexicographically; ids index into it).
pub fn load_raw_recordings(dir: &Path, manifest: &Path) -> Result<(Vec<Recording>, Vec<String>)> {
    let rows = read_manifest(manifest)?;
    let class_names: Vec<String> = rows
        .iter()
        .filter(|r| !r.label.is_empty())
        .map(|r| r.label.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut expected_channels: Option<Vec<String>> = None;
    let mut recordings = Vec::with_capacity(rows.len());
    for row in &rows {
        let channels = row.channel_list();
        match &expected_channels {
            None => expected_channels = Some(channels.clone()),
            Some(first) if *first != channels => {
                return Err(Error::Data(format!(
                    "{}: channel set {:?} differs from {:?}",
                    row.file, channels, first
                )));
            }
            Some(_) => {}
        }
        let path = dir.join(&row.file);
        let data = read_recording_csv(&path, &channels)?;
        let label = if row.label.is_empty() {
            None
        } else {
            Some(class_names.binary_search(&row.label).expect("label collected"))
        };
        recordings.push(Recording::new(channels, row.sample_rate_hz, data, label)?);
    }
    Ok((recordings, class_names))
}

/// One column per channel, one row per sample.
fn read_recording_csv(path: &Path, channels: &[String]) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    if header != channels {
        return Err(Error::Data(format!(
            "{}: header {:?} does not match manifest channels {:?}",
            path.display(),
            header,
            channels
        )));
    }
    let mut data = vec![Vec::new(); channels.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        for (c, cell) in record.iter().enumerate() {
            let v = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::BadCell {
                    path: path.to_path_buf(),
                    row: i + 1,
                    column: header[c].clone(),
                    value: cell.to_owned(),
                })?;
            data[c].push(v);
        }
    }
    Ok(data)
}

pub fn write_recording_csv(path: &Path, rec: &Recording) -> Result<()> {
    let mut out = rec.channels().join(",");
    out.push('\n');
    for t in 0..rec.n_samples() {
        let line: Vec<String> = rec.data().iter().map(|ch| ch[t].to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
