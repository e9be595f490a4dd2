use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eeg_gru::ErrorKind;

mod commands;

#[derive(Debug, Parser)]
#[command(name = "eeg-gru", version, about = "EEG emotion classification: DSP features, GRU and baselines")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Global seed; every component seed is derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// JSON run configuration. Flags override it; it overrides defaults.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate labelled synthetic EEG epochs and a manifest.
    Synth {
        /// Epochs per class.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        per_class: Option<u64>,
        /// Samples per epoch.
        #[arg(long)]
        window_len: Option<usize>,
        #[arg(long)]
        sample_rate: Option<f64>,
    },
    /// Filter, epoch, reject artifacts and extract features from raw recordings.
    Featurize {
        /// Manifest CSV; recording paths are resolved against its directory.
        #[arg(long)]
        manifest: PathBuf,
        /// Peak amplitude (µV) above which an epoch is rejected.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Stratified train/validation/test split of a feature CSV.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        train_frac: Option<f64>,
        #[arg(long)]
        val_frac: Option<f64>,
        #[arg(long)]
        test_frac: Option<f64>,
    },
    /// Train the GRU classifier.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[arg(long)]
        lr: Option<f64>,
        /// Maximum number of epochs.
        #[arg(long)]
        epochs: Option<usize>,
        /// Continue from an existing checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Score a checkpoint on a labelled feature CSV.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Train the GRU and all baselines on one split and tabulate test scores.
    Compare {
        /// Feature CSV to split; alternatively give the three split files.
        #[arg(long, conflicts_with_all = ["train", "val", "test"], required_unless_present = "train")]
        input: Option<PathBuf>,
        #[arg(long, requires_all = ["val", "test"])]
        train: Option<PathBuf>,
        #[arg(long)]
        val: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Render training curves and the comparison table.
    Report {
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(long)]
        comparison: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli.global, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 1,
                ErrorKind::Data => 2,
                ErrorKind::Numeric => 3,
            })
        }
    }
}
