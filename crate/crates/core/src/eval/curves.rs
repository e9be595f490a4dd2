use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::nn::TrainHistory;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 48.0;
const TRAIN_COLOR: &str = "#1f77b4";
const VAL_COLOR: &str = "#d62728";

fn value_range(series: &[&[f64]]) -> (f64, f64) {
    let finite = series.iter().flat_map(|s| s.iter()).copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn polyline(out: &mut String, values: &[f64], x0: f64, lo: f64, hi: f64, color: &str) {
    let n = values.len();
    let span = PANEL_W - 1.5 * MARGIN;
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.5 };
            let y = PANEL_H - MARGIN - (PANEL_H - 1.5 * MARGIN) * (v - lo) / (hi - lo);
            (x0 + MARGIN + span * t, y)
        })
        .collect();
    if let [(x, y)] = pts[..] {
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#).unwrap();
        return;
    }
    let joined: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
        joined.join(" ")
    )
    .unwrap();
}

fn panel(out: &mut String, x0: f64, title: &str, train: &[f64], val: &[f64]) {
    let (lo, hi) = value_range(&[train, val]);
    let (left, right) = (x0 + MARGIN, x0 + PANEL_W - MARGIN / 2.0);
    let (top, bottom) = (MARGIN / 2.0, PANEL_H - MARGIN);
    writeln!(
        out,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        right - left,
        bottom - top
    )
    .unwrap();
    writeln!(out, r#"<text x="{}" y="16" text-anchor="middle">{title}</text>"#, (left + right) / 2.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{hi:.3}</text>"#, left - 4.0, top + 10.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{bottom}" text-anchor="end">{lo:.3}</text>"#, left - 4.0).unwrap();
    writeln!(out, r#"<text x="{left}" y="{}">1</text>"#, bottom + 16.0).unwrap();
    writeln!(out, r#"<text x="{right}" y="{}" text-anchor="end">{}</text>"#, bottom + 16.0, train.len()).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">epoch</text>"#, (left + right) / 2.0, bottom + 32.0).unwrap();
    polyline(out, train, x0, lo, hi, TRAIN_COLOR);
    polyline(out, val, x0, lo, hi, VAL_COLOR);
}

/// Two-panel SVG: loss and accuracy against epoch for both splits.
pub fn curves_svg(history: &TrainHistory) -> String {
    let width = 2.0 * PANEL_W;
    let height = PANEL_H + 24.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    panel(&mut out, 0.0, "loss", &history.train_loss, &history.val_loss);
    panel(&mut out, PANEL_W, "accuracy", &history.train_acc, &history.val_acc);
    let ly = PANEL_H + 14.0;
    writeln!(out, r#"<text x="{}" y="{ly}" fill="{TRAIN_COLOR}">train</text>"#, MARGIN).unwrap();
    writeln!(out, r#"<text x="{}" y="{ly}" fill="{VAL_COLOR}">validation</text>"#, MARGIN + 48.0).unwrap();
    out.push_str("</svg>\n");
    out
}

/// Writes `curves.csv` and `curves.svg` into `dir`.
pub fn emit_curves(history: &TrainHistory, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    if history.is_empty() {
        return Err(Error::EmptyDataset("training history has no epochs".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("curves.csv");
    let svg = dir.join("curves.svg");
    history.write_csv(&csv)?;
    fs::write(&svg, curves_svg(history)).map_err(|e| Error::io(&svg, e))?;
    Ok((csv, svg))
}
