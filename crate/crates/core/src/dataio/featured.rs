use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};

pub const DEFAULT_LABEL_COLUMN: &str = "label";

/// Reads a featured CSV: a header row, numeric feature columns and one string
/// label column. Class ids follow the lexicographic order of label strings.
pub fn load_feature_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
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
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: "missing header row".into(),
        });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = header.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            message: format!("duplicate header column '{dup}'"),
        });
    }
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Csv {
            path: path.to_path_buf(),
            message: format!("label column '{label_column}' not found"),
        })?;

    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let n_features = feature_names.len();

    let mut values = Vec::new();
    let mut label_strings = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = row_idx + 1;
        if record.len() != header.len() {
            return Err(Error::Csv {
                path: path.to_path_buf(),
                message: format!("row {row}: expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                label_strings.push(cell.to_owned());
                continue;
            }
            let v = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::BadCell {
                    path: path.to_path_buf(),
                    row,
                    column: header[col].clone(),
                    value: cell.to_owned(),
                })?;
            values.push(v);
        }
    }
    if label_strings.is_empty() {
        return Err(Error::EmptyDataset(format!("{} has no data rows", path.display())));
    }

    let class_names: Vec<String> = label_strings
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let labels = label_strings
        .iter()
        .map(|s| class_names.binary_search(s).expect("label present"))
        .collect();
    let features = Array2::from_shape_vec((label_strings.len(), n_features), values)
        .expect("row lengths checked");
    Dataset::new(features, labels, class_names, feature_names)
}

/// Writes `ds` in the featured format; the label column is last.
pub fn write_feature_csv(path: &Path, ds: &Dataset, label_column: &str) -> Result<()> {
    let mut out = String::new();
    for name in &ds.feature_names {
        out.push_str(name);
        out.push(',');
    }
    out.push_str(label_column);
    out.push('\n');
    for (row, &label) in ds.features.rows().into_iter().zip(&ds.labels) {
        for v in row {
            // `Display` for f64 is the shortest round-tripping representation.
            out.push_str(&v.to_string());
            out.push(',');
        }
        out.push_str(&ds.class_names[label]);
        out.push('\n');
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
        let p = dir.path().join("f.csv");
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn classes_sorted_lexicographically() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "a,label,b\n1,POSITIVE,2\n3,NEGATIVE,4\n5,NEUTRAL,6\n7,POSITIVE,8\n",
        );
        let ds = load_feature_csv(&p, "label").unwrap();
        assert_eq!(ds.class_names, ["NEGATIVE", "NEUTRAL", "POSITIVE"]);
        assert_eq!(ds.labels, [2, 0, 1, 2]);
        assert_eq!(ds.feature_names, ["a", "b"]);
        assert_eq!(ds.features.row(1).to_vec(), [3.0, 4.0]);
    }

    #[test]
    fn single_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "f1,f2,label\n0,0,NEUTRAL\n");
        let ds = load_feature_csv(&p, "label").unwrap();
        assert_eq!(ds.features.shape(), &[1, 2]);
        assert_eq!(ds.features.row(0).to_vec(), [0.0, 0.0]);
        assert_eq!(ds.labels, [0]);
        assert_eq!(ds.class_names, ["NEUTRAL"]);
    }

    #[test]
    fn nan_cell_names_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "f1,f2,label\n0,1,A\n2,NaN,B\n");
        match load_feature_csv(&p, "label") {
            Err(Error::BadCell { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "f2");
            }
            other => panic!("expected BadCell, got {other:?}"),
        }
    }

    #[test]
    fn contract_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_feature_csv(&dir.path().join("missing.csv"), "label"),
            Err(Error::Io { .. })
        ));
        let p = write(&dir, "f1,f1,label\n0,1,A\n");
        assert!(matches!(load_feature_csv(&p, "label"), Err(Error::Csv { .. })));
        let p = write(&dir, "f1,f2\n0,1\n");
        assert!(matches!(load_feature_csv(&p, "label"), Err(Error::Csv { .. })));
        let p = write(&dir, "f1,label\n");
        assert!(matches!(load_feature_csv(&p, "label"), Err(Error::EmptyDataset(_))));
        let p = write(&dir, "");
        assert!(load_feature_csv(&p, "label").is_err());
    }

    #[test]
    fn write_then_load_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let features =
            Array2::from_shape_vec((3, 2), vec![0.1, -2.5e-17, 1.0 / 3.0, 7.0, 1e300, -0.0]).unwrap();
        let ds = Dataset::new(
            features,
            vec![1, 0, 1],
            vec!["A".into(), "B".into()],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let p = dir.path().join("out.csv");
        write_feature_csv(&p, &ds, "label").unwrap();
        let back = load_feature_csv(&p, "label").unwrap();
        assert_eq!(back, ds);
        // Stable mapping across reloads.
        assert_eq!(load_feature_csv(&p, "label").unwrap().labels, back.labels);
    }
}
