//! `gridcast`: synthetic data, training, gap filling and evaluation of
//! load forecasting strategies from the command line.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use config::{read_config, Features, Preset, RunConfig, ScenarioName};
use error::CliError;

#[derive(Parser)]
#[command(name = "gridcast", version, about = "Energy load forecasting strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory holding load.csv, weather.csv and optionally holidays.txt.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic load and weather data set.
    Synth {
        #[arg(long)]
        hours: Option<usize>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Train one strategy, once per seed.
    Train {
        /// baseline, afore, reself or osdf.
        #[arg(long)]
        strategy: Option<String>,
        /// l1, l2, smooth_l1 or mape.
        #[arg(long)]
        loss: Option<String>,
        /// Self-distillation weight in (0, 1).
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum)]
        features: Option<Features>,
        #[arg(long, value_enum)]
        scenario: Option<ScenarioName>,
        /// Hours between window starts.
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        /// Train seeds `seed, seed+1, ...`.
        #[arg(long)]
        seeds: Option<usize>,
        /// Hide the holiday, weekend and weekday entries from the first network.
        #[arg(long)]
        blind_calendar: bool,
        /// Treat the self-distillation target as a constant.
        #[arg(long)]
        stop_gradient: bool,
    },
    /// Write test-split predictions of an artifact.
    Predict {
        #[arg(long = "artifact")]
        artifacts: Vec<PathBuf>,
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Fill a gap of whole days with day-ahead predictions.
    Gapfill {
        #[arg(long = "artifact")]
        artifacts: Vec<PathBuf>,
        #[arg(long)]
        gap_start: Option<NaiveDate>,
        #[arg(long)]
        gap_days: Option<usize>,
        /// Hide the observed gap hours first and score the fill against them.
        #[arg(long)]
        mask: bool,
    },
    /// Score artifacts of one strategy on the test split.
    Evaluate {
        #[arg(long = "artifact")]
        artifacts: Vec<PathBuf>,
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Score several strategies side by side.
    Compare {
        #[arg(long = "artifact")]
        artifacts: Vec<PathBuf>,
        #[arg(long)]
        stride: Option<usize>,
    },
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => read_config(p)?,
        None => RunConfig::default(),
    };
    let mut flags = RunConfig {
        seed: cli.common.seed,
        out: cli.common.out,
        data: cli.common.data,
        ..RunConfig::default()
    };
    let name = match cli.command {
        Command::Synth { hours, preset } => {
            flags.hours = hours;
            flags.preset = preset;
            "synth"
        }
        Command::Train {
            strategy,
            loss,
            lambda,
            features,
            scenario,
            stride,
            epochs,
            seeds,
            blind_calendar,
            stop_gradient,
        } => {
            flags.strategy = strategy;
            flags.loss = loss;
            flags.lambda = lambda;
            flags.features = features;
            flags.scenario = scenario;
            flags.stride = stride;
            flags.epochs = epochs;
            flags.seeds = seeds;
            flags.blind_calendar = flag(blind_calendar);
            flags.stop_gradient = flag(stop_gradient);
            "train"
        }
        Command::Predict { artifacts, stride } => {
            flags.artifacts = artifacts;
            flags.stride = stride;
            "predict"
        }
        Command::Gapfill {
            artifacts,
            gap_start,
            gap_days,
            mask,
        } => {
            flags.artifacts = artifacts;
            flags.gap_start = gap_start;
            flags.gap_days = gap_days;
            flags.mask = flag(mask);
            "gapfill"
        }
        Command::Evaluate { artifacts, stride } => {
            flags.artifacts = artifacts;
            flags.stride = stride;
            "evaluate"
        }
        Command::Compare { artifacts, stride } => {
            flags.artifacts = artifacts;
            flags.stride = stride;
            "compare"
        }
    };
    let cfg = file.overlay(flags);
    match name {
        "synth" => commands::synth(&cfg),
        "train" => commands::train(&cfg),
        "predict" => commands::predict(&cfg),
        "gapfill" => commands::gapfill(&cfg),
        "evaluate" => commands::evaluate(&cfg),
        _ => commands::compare(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Usage(first).to_line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
