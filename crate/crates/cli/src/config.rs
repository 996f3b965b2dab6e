//! Run configuration: defaults, a flat `key = value` config file and
//! command-line overrides, merged in that order.

use std::path::PathBuf;
use std::str::FromStr;

use bsac::autoencoder::{validate_layer_sizes, SAConfig};
use bsac::eval::resolve_architecture;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum DatasetKind {
    #[serde(rename = "taiwan")]
    #[value(name = "taiwan")]
    Taiwan,
    #[serde(rename = "lendingclub")]
    #[value(name = "lendingclub")]
    LendingClub,
    #[serde(rename = "generic-csv")]
    #[value(name = "generic-csv")]
    GenericCsv,
}

impl FromStr for DatasetKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "taiwan" => Ok(DatasetKind::Taiwan),
            "lendingclub" => Ok(DatasetKind::LendingClub),
            "generic-csv" => Ok(DatasetKind::GenericCsv),
            other => Err(CliError::Config(format!(
                "unknown dataset `{other}` (expected taiwan, lendingclub or generic-csv)"
            ))),
        }
    }
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Taiwan => "taiwan",
            DatasetKind::LendingClub => "lendingclub",
            DatasetKind::GenericCsv => "generic-csv",
        }
    }

    /// Layer sizes used when none are configured.
    pub fn default_arch(self, width: usize) -> Vec<usize> {
        match self {
            DatasetKind::Taiwan => SAConfig::taiwan().layer_sizes,
            DatasetKind::LendingClub => SAConfig::lending_club().layer_sizes,
            DatasetKind::GenericCsv => {
                let half = width.div_ceil(2).max(1);
                let quarter = width.div_ceil(4).max(1);
                vec![width, half, quarter, half, width]
            }
        }
    }
}

pub const DEFAULT_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const FAST_GRID: [f64; 3] = [0.1, 0.5, 0.9];
pub const FAST_EPOCHS: usize = 50;

/// Partially specified settings from one source. `None` means "not set".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub dataset: Option<DatasetKind>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub gamma_grid: Option<Vec<f64>>,
    pub folds: Option<usize>,
    pub arch: Option<Vec<usize>>,
    pub label_column: Option<String>,
    pub validation_fraction: Option<f64>,
    pub fast: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse_value(key, v)).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(CliError::Config(format!("invalid value `{other}` for `{key}`"))),
    }
}

impl Settings {
    /// Parses a config file. Blank lines and lines starting with `#` are
    /// skipped; keys accept `-` or `_`.
    pub fn parse(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "dataset" => s.dataset = Some(value.parse()?),
                "input" => s.input = Some(PathBuf::from(value)),
                "out" => s.out = Some(PathBuf::from(value)),
                "seed" => s.seed = Some(parse_value(&key, value)?),
                "epochs" => s.epochs = Some(parse_value(&key, value)?),
                "batch_size" => s.batch_size = Some(parse_value(&key, value)?),
                "learning_rate" => s.learning_rate = Some(parse_value(&key, value)?),
                "gamma_grid" => s.gamma_grid = Some(parse_list(&key, value)?),
                "folds" => s.folds = Some(parse_value(&key, value)?),
                "arch" => s.arch = Some(parse_list(&key, value)?),
                "label_column" => s.label_column = Some(value.to_string()),
                "validation_fraction" => s.validation_fraction = Some(parse_value(&key, value)?),
                "fast" => s.fast = Some(parse_bool(&key, value)?),
                _ => return Err(CliError::Config(format!("config line {}: unknown key `{key}`", n + 1))),
            }
        }
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Settings> {
        if !path.exists() {
            return Err(CliError::MissingInput(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Settings::parse(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: Settings) -> Settings {
        Settings {
            dataset: over.dataset.or(self.dataset),
            input: over.input.or(self.input),
            out: over.out.or(self.out),
            seed: over.seed.or(self.seed),
            epochs: over.epochs.or(self.epochs),
            batch_size: over.batch_size.or(self.batch_size),
            learning_rate: over.learning_rate.or(self.learning_rate),
            gamma_grid: over.gamma_grid.or(self.gamma_grid),
            folds: over.folds.or(self.folds),
            arch: over.arch.or(self.arch),
            label_column: over.label_column.or(self.label_column),
            validation_fraction: over.validation_fraction.or(self.validation_fraction),
            fast: over.fast.or(self.fast),
        }
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: Option<DatasetKind>,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
    /// `None` selects the dataset's default architecture.
    pub arch: Option<Vec<usize>>,
    pub label_column: String,
    pub validation_fraction: f64,
    pub fast: bool,
}

impl RunConfig {
    /// Applies defaults and validates. `--fast` changes the epoch and grid
    /// defaults only; explicit values still win.
    pub fn resolve(s: Settings) -> Result<RunConfig> {
        let fast = s.fast.unwrap_or(false);
        let config = RunConfig {
            dataset: s.dataset,
            input: s.input,
            out: s.out.unwrap_or_else(|| PathBuf::from("bsac-out")),
            seed: s.seed.unwrap_or(0),
            epochs: s.epochs.unwrap_or(if fast { FAST_EPOCHS } else { 200 }),
            batch_size: s.batch_size.unwrap_or(256),
            learning_rate: s.learning_rate.unwrap_or(1e-3),
            gamma_grid: s
                .gamma_grid
                .unwrap_or_else(|| if fast { FAST_GRID.to_vec() } else { DEFAULT_GRID.to_vec() }),
            folds: s.folds.unwrap_or(5),
            arch: s.arch,
            label_column: s.label_column.unwrap_or_else(|| "label".to_string()),
            validation_fraction: s.validation_fraction.unwrap_or(0.2),
            fast,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.gamma_grid.is_empty() {
            return bad("gamma grid is empty".into());
        }
        if let Some(g) = self.gamma_grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return bad(format!("gamma {g} outside [0, 1]"));
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.folds < 3 {
            return bad(format!("folds must be at least 3, got {}", self.folds));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad(format!("validation fraction must be in (0, 1), got {}", self.validation_fraction));
        }
        if let Some(arch) = &self.arch {
            validate_layer_sizes(arch).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn dataset(&self) -> Result<DatasetKind> {
        self.dataset
            .ok_or_else(|| CliError::Config("no dataset kind given (use --dataset)".into()))
    }

    pub fn input(&self) -> Result<&std::path::Path> {
        let path = self
            .input
            .as_deref()
            .ok_or_else(|| CliError::Config("no input file given (use --input)".into()))?;
        if !path.is_file() {
            return Err(CliError::MissingInput(path.to_path_buf()));
        }
        Ok(path)
    }

    /// Base model configuration for data of the given encoded width.
    pub fn sa_config(&self, kind: DatasetKind, width: usize) -> SAConfig {
        let arch = self.arch.clone().unwrap_or_else(|| kind.default_arch(width));
        SAConfig {
            layer_sizes: resolve_architecture(&arch, width),
            gamma: self.gamma_grid[0],
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocol() {
        let c = RunConfig::resolve(Settings::default()).unwrap();
        assert_eq!(c.epochs, 200);
        assert_eq!(c.folds, 5);
        assert_eq!(c.batch_size, 256);
        assert_eq!(c.gamma_grid, DEFAULT_GRID);
        assert_eq!(DatasetKind::Taiwan.default_arch(32), vec![32, 16, 8, 5, 8, 16, 32]);
    }

    #[test]
    fn fast_changes_defaults_only() {
        let c = RunConfig::resolve(Settings {
            fast: Some(true),
            ..Settings::default()
        })
        .unwrap();
        assert_eq!((c.epochs, c.gamma_grid.as_slice()), (50, &FAST_GRID[..]));
        let c = RunConfig::resolve(Settings {
            fast: Some(true),
            epochs: Some(7),
            ..Settings::default()
        })
        .unwrap();
        assert_eq!(c.epochs, 7);
    }

    #[test]
    fn file_then_flags() {
        let file = Settings::parse("# comment\ndataset = taiwan\nepochs=10\ngamma-grid = 0.2, 0.4\n\nseed=3\n").unwrap();
        assert_eq!(file.gamma_grid, Some(vec![0.2, 0.4]));
        let flags = Settings {
            epochs: Some(20),
            ..Settings::default()
        };
        let c = RunConfig::resolve(file.merge(flags)).unwrap();
        assert_eq!((c.epochs, c.seed, c.dataset), (20, 3, Some(DatasetKind::Taiwan)));
    }

    #[test]
    fn rejects_bad_values() {
        for text in ["gamma_grid = 0.5,1.5", "folds = 2", "epochs = 0", "arch = 4,2,3", "colour = red", "seed"] {
            let r = Settings::parse(text).and_then(RunConfig::resolve);
            assert!(matches!(r, Err(CliError::Config(_))), "{text}: {r:?}");
        }
    }

    #[test]
    fn generic_default_arch_halves() {
        assert_eq!(DatasetKind::GenericCsv.default_arch(10), vec![10, 5, 3, 5, 10]);
        assert_eq!(DatasetKind::GenericCsv.default_arch(1), vec![1, 1, 1, 1, 1]);
    }
}
