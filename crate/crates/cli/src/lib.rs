//! Command-line driver for the bagging supervised autoencoder classifier.
//!
//! Settings come from built-in defaults, then an optional flat
//! `key = value` config file, then flags; later sources win.

pub mod archive;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use bsac::Execution;
use config::{parse_list, DatasetKind, RunConfig, Settings};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "bsac", version, about = "Bagging supervised autoencoder classifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a raw CSV and write dataset.csv plus schema.json.
    Prepare(CommonArgs),
    /// Fit one ensemble on a stratified holdout and save model.json.
    Train(CommonArgs),
    /// Apply a saved model to a CSV and write predictions.csv.
    Predict {
        #[command(flatten)]
        common: CommonArgs,
        /// Model archive written by `train`.
        #[arg(long)]
        model: PathBuf,
    },
    /// Stratified k-fold cross-validation with per-fold gamma selection.
    Cv(CommonArgs),
    /// Validation F1 for every (subset, gamma) candidate on the holdout.
    Sweep(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat key = value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetKind>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory (default bsac-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Comma-separated gamma values, e.g. 0.1,0.5,0.9.
    #[arg(long)]
    pub gamma_grid: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Comma-separated palindromic layer sizes, e.g. 32,16,8,5,8,16,32.
    #[arg(long)]
    pub arch: Option<String>,
    /// Label column for generic-csv input (default `label`).
    #[arg(long)]
    pub label_column: Option<String>,
    /// Validation share of the holdout used by train and sweep (default 0.2).
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    /// 50 epochs and gamma grid {0.1, 0.5, 0.9} unless set explicitly.
    #[arg(long)]
    pub fast: bool,
    /// Log progress at info level.
    #[arg(short, long)]
    pub verbose: bool,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings> {
        Ok(Settings {
            dataset: self.dataset,
            input: self.input.clone(),
            out: self.out.clone(),
            seed: self.seed,
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            gamma_grid: self.gamma_grid.as_deref().map(|g| parse_list("gamma-grid", g)).transpose()?,
            folds: self.folds,
            arch: self.arch.as_deref().map(|a| parse_list("arch", a)).transpose()?,
            label_column: self.label_column.clone(),
            validation_fraction: self.validation_fraction,
            fast: self.fast.then_some(true),
        })
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        RunConfig::resolve(file.merge(self.settings()?))
    }
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Prepare(c) | Command::Train(c) | Command::Cv(c) | Command::Sweep(c) => c,
            Command::Predict { common, .. } => common,
        }
    }
}

/// Caps the global worker pool from `BSAC_THREADS` (unset or 0 = automatic).
pub fn configure_threads() -> Result<()> {
    let threads = match std::env::var("BSAC_THREADS") {
        Err(_) => return Ok(()),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("BSAC_THREADS must be a non-negative integer, got `{v}`")))?,
    };
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure {threads} worker threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    let config = cli.command.common().resolve()?;
    let exec = Execution::default();
    match &cli.command {
        Command::Prepare(_) => {
            let s = commands::prepare(&config)?;
            println!(
                "{} rows, {} features, {} positives, imbalance ratio {}",
                s.rows,
                s.features,
                s.positives,
                s.imbalance_ratio.map_or("n/a".to_string(), |r| format!("{r:.4}"))
            );
        }
        Command::Train(_) => {
            let (_, r) = commands::train(&config, exec)?;
            let m = &r.validation_metrics;
            println!(
                "{} base classifiers, gammas {:?}; validation recall {:.4} f1 {:.4} g_mean {:.4} specificity {:.4}",
                r.base_classifiers, r.gammas, m.recall, m.f1, m.g_mean, m.specificity
            );
        }
        Command::Predict { model, .. } => {
            let p = commands::predict(&config, model, exec)?;
            let positives = p.labels.iter().filter(|&&l| l == 1).count();
            println!("{} rows, {positives} predicted positive", p.rows.len());
        }
        Command::Cv(_) => print!("{}", report::cv_table(&commands::cv(&config, exec)?)),
        Command::Sweep(_) => print!("{}", report::sweep_csv(&commands::sweep(&config, exec)?)),
    }
    println!("outputs in {}", config.out.display());
    Ok(())
}
