//! `specamc`: synthesize, convert, build datasets, train, evaluate, bench.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specamc::ModulationScheme;

use crate::config::PipelineConfig;

/// Bad invocation or missing prerequisite (exit 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "specamc",
    version,
    about = "Spectrogram-based modulation classification pipeline"
)]
pub struct Cli {
    /// TOML pipeline config; built-in defaults when omitted
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed, overrides the config
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads for dataset, spectrogram and training stages
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Output directory, overrides the config
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize frames into an IQ archive
    Synth(SynthArgs),
    /// Convert an IQ archive into spectrogram images
    Spectrogram(SpectrogramArgs),
    /// Build a labelled image dataset with a manifest
    Dataset(DatasetArgs),
    /// (Re)assign stratified k-fold splits in an existing manifest
    Split(SplitArgs),
    /// Train on a dataset split
    Train(TrainArgs),
    /// Evaluate checkpoints on their test folds
    Eval(EvalArgs),
    /// Cost model and wall-clock benchmark of the two presets
    Bench(BenchArgs),
    /// Print the effective config as TOML
    Config,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scheme to synthesize (repeatable); all schemes when omitted
    #[arg(long = "scheme", value_name = "NAME")]
    schemes: Vec<ModulationScheme>,
    /// Frames per scheme
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Pass frames through the channel at this SNR (dB); clean when omitted
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    snr: Option<f64>,
    /// Archive path; defaults to <out>/iq/frames.iqf
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrogramArgs {
    /// IQ archive to convert
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Also write raw f32 grids with descriptors
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Scheme to include (repeatable); overrides the config
    #[arg(long = "scheme", value_name = "NAME")]
    schemes: Vec<ModulationScheme>,
    /// Images per class (per SNR in the per-snr layout)
    #[arg(long, value_name = "N")]
    samples_per_class: Option<usize>,
    /// SNR in dB (repeatable); overrides the config
    #[arg(long = "snr", value_name = "DB", allow_negative_numbers = true)]
    snrs: Vec<i32>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Number of folds
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Test fold to hold out
    #[arg(long, default_value_t = 0, conflicts_with = "kfold")]
    fold: usize,
    /// Train one model per fold
    #[arg(long)]
    kfold: bool,
    /// Override max_epochs
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,
    /// Override initial_lr
    #[arg(long, value_name = "LR")]
    lr: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Test fold to evaluate
    #[arg(long, default_value_t = 0, conflicts_with = "kfold")]
    fold: usize,
    /// Evaluate every fold's checkpoint and pool the results
    #[arg(long)]
    kfold: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Spectrograms per timed batch
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Timed runs per preset (median reported)
    #[arg(long, default_value_t = 5)]
    runs: usize,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.apply_seed(seed);
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    let jobs = match cli.jobs {
        Some(0) => return Err(UsageError("--jobs must be at least 1".into()).into()),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // a second initialization fails harmlessly
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
    if let Command::Config = cli.command {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    cfg.validate()?;
    match cli.command {
        Command::Synth(a) => commands::synth(&cfg, a),
        Command::Spectrogram(a) => commands::spectrogram(&cfg, a),
        Command::Dataset(a) => commands::dataset(&mut cfg, a, jobs),
        Command::Split(a) => commands::split(&cfg, a),
        Command::Train(a) => commands::train(&cfg, a),
        Command::Eval(a) => commands::eval(&cfg, a),
        Command::Bench(a) => commands::bench(&cfg, a),
        Command::Config => unreachable!(),
    }
}

/// `(exit code, kind)` for an error chain.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return (2, "usage");
        }
        if let Some(e) = cause.downcast_ref::<specamc::Error>() {
            return match e {
                specamc::Error::Integrity { .. } | specamc::Error::Format { .. } => {
                    (3, "integrity")
                }
                specamc::Error::Build { source, .. }
                    if matches!(**source, specamc::Error::Integrity { .. }) =>
                {
                    (3, "integrity")
                }
                specamc::Error::Io { .. } => (1, "io"),
                specamc::Error::Diverged { .. } => (1, "training"),
                _ => (1, "pipeline"),
            };
        }
    }
    (1, "internal")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = classify(&err);
            let msg = format!("{err:#}").replace(['\n', '\r'], " ");
            eprintln!("error kind={kind} message={msg:?}");
            ExitCode::from(code)
        }
    }
}
