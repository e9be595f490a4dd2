use std::fs;
use std::path::{Path, PathBuf};

use eeg_gru::dataio::{
    load_feature_csv, load_raw_recordings, synth_generate, write_feature_csv, write_manifest, write_recording_csv,
    write_split, Dataset, ManifestRow, Recording, SYNTH_CHANNELS, SYNTH_CLASS_NAMES,
};
use eeg_gru::eval::{emit_curves, ComparisonTable, ConfusionMatrix, MetricsReport};
use eeg_gru::nn::{Checkpoint, TrainHistory};
use eeg_gru::pipeline::{self, RunConfig};
use eeg_gru::{Error, Result};
use serde_json::json;

use crate::{Command, GlobalArgs};

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn load_config(global: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn load_features(path: &Path, cfg: &RunConfig) -> Result<Dataset> {
    load_feature_csv(path, &cfg.label_column)
}

fn write_metrics(dir: &Path, cm: &ConfusionMatrix, m: &MetricsReport) -> Result<()> {
    write_text(&dir.join("confusion.csv"), &cm.to_csv())?;
    write_text(&dir.join("metrics.json"), &serde_json::to_string_pretty(m)?)
}

fn print_metrics(label: &str, m: &MetricsReport) {
    println!(
        "{label}: accuracy {:.4}  macro precision {:.4}  macro recall {:.4}  macro F1 {:.4}",
        m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1
    );
}

pub fn run(global: &GlobalArgs, command: &Command) -> Result<()> {
    let mut cfg = load_config(global)?;
    let out = global.out.as_path();

    // Command flags take precedence over the config file.
    match command {
        Command::Synth {
            per_class,
            window_len,
            sample_rate,
        } => {
            if let Some(n) = per_class {
                cfg.synth.per_class = *n as usize;
            }
            if let Some(w) = window_len {
                cfg.synth.window_len = *w;
            }
            if let Some(fs) = sample_rate {
                cfg.synth.sample_rate_hz = *fs;
            }
        }
        Command::Featurize { threshold: Some(t), .. } => cfg.signal.artifact_threshold_uv = *t,
        Command::Split {
            train_frac,
            val_frac,
            test_frac,
            ..
        } => {
            cfg.split.train = train_frac.unwrap_or(cfg.split.train);
            cfg.split.val = val_frac.unwrap_or(cfg.split.val);
            cfg.split.test = test_frac.unwrap_or(cfg.split.test);
        }
        Command::Train { lr, epochs, .. } => {
            cfg.train.learning_rate = lr.unwrap_or(cfg.train.learning_rate);
            cfg.train.max_epochs = epochs.unwrap_or(cfg.train.max_epochs);
        }
        _ => {}
    }
    cfg.validate()?;
    if cfg.synth.per_class == 0 {
        return Err(Error::Config("per_class must be ≥ 1".into()));
    }

    let source = match &global.config {
        Some(p) => p.display().to_string(),
        None => "built-in defaults".into(),
    };
    eprintln!("seed {} (config: {source})", cfg.seed);
    if global.verbose {
        eprintln!("{}", cfg.to_json());
    }
    create_dir(out)?;

    match command {
        Command::Synth { .. } => synth(&cfg, out),
        Command::Featurize { manifest, .. } => featurize(&cfg, manifest, out),
        Command::Split { input, .. } => split(&cfg, input, out),
        Command::Train { train, val, resume, .. } => train_cmd(&cfg, train, val, resume.as_deref(), out, global.verbose),
        Command::Evaluate { checkpoint, data } => evaluate(&cfg, checkpoint, data, out),
        Command::Compare { input, train, val, test } => {
            let (tr, va, te) = match (input, train, val, test) {
                (Some(input), ..) => pipeline::split(&load_features(input, &cfg)?, &cfg)?,
                (None, Some(tr), Some(va), Some(te)) => (
                    load_features(tr, &cfg)?,
                    load_features(va, &cfg)?,
                    load_features(te, &cfg)?,
                ),
                _ => return Err(Error::Config("compare needs --input or all of --train/--val/--test".into())),
            };
            compare(&cfg, &tr, &va, &te, out)
        }
        Command::Report { history, comparison } => report(history.as_deref(), comparison.as_deref(), out),
    }
}

fn synth(cfg: &RunConfig, out: &Path) -> Result<()> {
    let s = &cfg.synth;
    let epochs = synth_generate(s.per_class, s.window_len, s.sample_rate_hz, cfg.sub_seed("synth"))?;
    let channels: Vec<String> = SYNTH_CHANNELS.iter().map(|c| c.to_string()).collect();
    let mut rows = Vec::with_capacity(epochs.len());
    for (i, e) in epochs.into_iter().enumerate() {
        let file = format!("epoch_{i:05}.csv");
        let label = SYNTH_CLASS_NAMES[e.label].to_string();
        let rec = Recording::new(channels.clone(), s.sample_rate_hz, e.data, Some(e.label))?;
        write_recording_csv(&out.join(&file), &rec)?;
        rows.push(ManifestRow {
            file,
            label,
            sample_rate_hz: s.sample_rate_hz,
            channels: channels.join(";"),
        });
    }
    write_manifest(&out.join("manifest.csv"), &rows)?;
    println!("wrote {} epochs and manifest.csv to {}", rows.len(), out.display());
    Ok(())
}

fn featurize(cfg: &RunConfig, manifest: &Path, out: &Path) -> Result<()> {
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let (recordings, class_names) = load_raw_recordings(dir, manifest)?;
    let result = pipeline::featurize(&recordings, &class_names, cfg)?;
    println!("rejected {} of {} epochs", result.rejected, result.n_epochs);
    if result.dataset.n_examples() == 0 {
        eprintln!(
            "warning: every epoch exceeded the {} µV artifact threshold; the feature file is empty",
            cfg.signal.artifact_threshold_uv
        );
    }
    let path = out.join("features.csv");
    write_feature_csv(&path, &result.dataset, &cfg.label_column)?;
    println!(
        "wrote {} rows × {} features to {}",
        result.dataset.n_examples(),
        result.dataset.n_features(),
        path.display()
    );
    Ok(())
}

fn split(cfg: &RunConfig, input: &Path, out: &Path) -> Result<()> {
    let ds = load_features(input, cfg)?;
    let (train, val, test) = pipeline::split(&ds, cfg)?;
    let sidecar = write_split(out, &cfg.split_spec(), (&train, &val, &test), &cfg.label_column)?;
    println!(
        "train {} / val {} / test {} rows written to {}",
        train.n_examples(),
        val.n_examples(),
        test.n_examples(),
        out.display()
    );
    for (c, name) in sidecar.class_names.iter().enumerate() {
        let k = &sidecar.counts_per_class;
        println!("  {name}: {} / {} / {}", k.train[c], k.val[c], k.test[c]);
    }
    Ok(())
}

fn train_cmd(
    cfg: &RunConfig,
    train: &Path,
    val: &Path,
    resume: Option<&Path>,
    out: &Path,
    verbose: bool,
) -> Result<()> {
    let train = load_features(train, cfg)?;
    let val = load_features(val, cfg)?;
    let resume = resume.map(Checkpoint::load).transpose()?;
    let (ck, history) = pipeline::train_gru(&train, &val, cfg, resume.as_ref())?;

    ck.save(&out.join("checkpoint.json"))?;
    if let Some(norm) = &ck.normalization {
        write_text(&out.join("normalization.json"), &serde_json::to_string_pretty(norm)?)?;
    }
    history.write_csv(&out.join("history.csv"))?;
    if verbose {
        eprint!("{}", history.to_csv());
    }
    println!("trained {} epochs", history.len());
    if let Some(best) = history.best_epoch() {
        println!("best epoch {}", best + 1);
    }
    let (_, m) = pipeline::evaluate_checkpoint(&ck, &val)?;
    print_metrics("validation", &m);
    Ok(())
}

fn evaluate(cfg: &RunConfig, checkpoint: &Path, data: &Path, out: &Path) -> Result<()> {
    let ck = Checkpoint::load(checkpoint)?;
    let ds = load_features(data, cfg)?;
    let (cm, m) = pipeline::evaluate_checkpoint(&ck, &ds)?;
    write_metrics(out, &cm, &m)?;
    print_metrics("evaluation", &m);
    print!("{}", cm.to_csv());
    Ok(())
}

fn compare(cfg: &RunConfig, train: &Dataset, val: &Dataset, test: &Dataset, out: &Path) -> Result<()> {
    let cmp = pipeline::compare(train, val, test, cfg)?;
    write_text(&out.join("comparison.csv"), &cmp.table.to_csv())?;
    write_text(&out.join("comparison.txt"), &cmp.table.to_text())?;
    cmp.history.write_csv(&out.join("history.csv"))?;
    cmp.checkpoint.save(&out.join("checkpoint.json"))?;
    let per_model: Vec<_> = cmp
        .results
        .iter()
        .map(|r| json!({ "model": r.name, "metrics": r.metrics, "confusion": r.confusion }))
        .collect();
    write_text(&out.join("metrics.json"), &serde_json::to_string_pretty(&per_model)?)?;
    print!("{}", cmp.table.to_text());
    Ok(())
}

fn report(history: Option<&Path>, comparison: Option<&Path>, out: &Path) -> Result<()> {
    if history.is_none() && comparison.is_none() {
        return Err(Error::Config("report needs --history and/or --comparison".into()));
    }
    if let Some(path) = history {
        let h = TrainHistory::read_csv(path)?;
        let (csv, svg) = emit_curves(&h, out)?;
        println!("wrote {} and {}", csv.display(), svg.display());
    }
    if let Some(path) = comparison {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: PathBuf::from(path),
            source: e,
        })?;
        let table = ComparisonTable::from_csv(&text)?;
        let txt = table.to_text();
        write_text(&out.join("comparison.txt"), &txt)?;
        print!("{txt}");
    }
    Ok(())
}
