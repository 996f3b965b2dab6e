//! The five subcommands. Each takes a resolved [`RunConfig`] and writes its
//! artifacts into the configured output directory.

use std::path::Path;

use bsac::data::{
    generic_frame, lending_club_frame, load_csv, taiwan_frame, Dataset, FeatureFrame, LendingClubReport, LC_DATE_COLUMNS,
};
use bsac::ensemble::{imbalance_ratio, train_bsac, BSACModel, ModelMetadata};
use bsac::eval::{confusion, gamma_sweep, metrics, run_cv, CVReport, ConfusionMatrix, MetricsReport};
use bsac::nn::{derive_seed, Rng};
use bsac::Execution;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::archive::{ArchiveMetadata, ModelArchive};
use crate::config::{DatasetKind, RunConfig};
use crate::error::{CliError, Result};
use crate::output::OutputDir;
use crate::report;

/// Stream id for the train/validation split of `train` and `sweep`.
const STREAM_SPLIT: u64 = 0x5e;

pub const MODEL_FILE: &str = "model.json";
pub const PREDICTIONS_FILE: &str = "predictions.csv";

/// Reads `path` as a raw table and extracts the frame for `kind`.
pub fn load_frame(
    kind: DatasetKind,
    path: &Path,
    label_column: &str,
    require_label: bool,
) -> Result<(FeatureFrame, Option<LendingClubReport>)> {
    if !path.is_file() {
        return Err(CliError::MissingInput(path.to_path_buf()));
    }
    Ok(match kind {
        DatasetKind::Taiwan => (taiwan_frame(&load_csv(path, &[])?, require_label)?, None),
        DatasetKind::LendingClub => {
            let (frame, report) = lending_club_frame(&load_csv(path, &LC_DATE_COLUMNS)?, require_label)?;
            log::info!("lending club preparation: {report:?}");
            (frame, Some(report))
        }
        DatasetKind::GenericCsv => (generic_frame(&load_csv(path, &[])?, label_column, require_label)?, None),
    })
}

/// Hex SHA-256 of a file's bytes.
pub fn fingerprint(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Stratified holdout: each class contributes `round(fraction * count)`
/// rows (at least one, at most all but one) to the validation side.
/// Both index lists come back sorted.
pub fn stratified_split(labels: &[f64], fraction: f64, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [1.0, 0.0] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut idx);
        let n = idx.len();
        let take = if n < 2 { 0 } else { ((fraction * n as f64).round() as usize).clamp(1, n - 1) };
        val.extend_from_slice(&idx[..take]);
        train.extend_from_slice(&idx[take..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct SchemaReport {
    pub dataset: &'static str,
    pub rows: usize,
    pub features: usize,
    pub feature_names: Vec<String>,
    pub positives: usize,
    pub negatives: usize,
    /// Negatives per positive; absent when a class is empty.
    pub imbalance_ratio: Option<f64>,
    pub base_classifiers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lending_club: Option<LendingClubReport>,
}

impl SchemaReport {
    fn new(kind: DatasetKind, ds: &Dataset, lending_club: Option<LendingClubReport>) -> Self {
        let ir = imbalance_ratio(&ds.labels).ok();
        let positives = ds.positives();
        SchemaReport {
            dataset: kind.name(),
            rows: ds.rows(),
            features: ds.features.cols(),
            feature_names: ds.feature_names.clone(),
            positives,
            negatives: ds.rows() - positives,
            imbalance_ratio: ir.map(|r| r.0),
            base_classifiers: ir.map(|r| r.1),
            lending_club,
        }
    }
}

/// Writes the encoded dataset (`dataset.csv`, label in the last column)
/// and `schema.json`. Preprocessing is fit on the whole file.
pub fn prepare(config: &RunConfig) -> Result<SchemaReport> {
    let kind = config.dataset()?;
    let (frame, lc) = load_frame(kind, config.input()?, &config.label_column, true)?;
    let params = frame.fit()?;
    let ds = frame.dataset(&params)?;
    let out = OutputDir::create(&config.out)?;
    let mut csv = Vec::new();
    ds.write_csv(&mut csv).map_err(|e| CliError::io(out.path().join("dataset.csv"), e))?;
    out.write("dataset.csv", &csv)?;
    let schema = SchemaReport::new(kind, &ds, lc);
    out.write("schema.json", to_json(&schema).as_bytes())?;
    Ok(schema)
}

fn holdout(config: &RunConfig, frame: &FeatureFrame) -> Result<(FeatureFrame, FeatureFrame)> {
    let mut rng = Rng::new(derive_seed(config.seed, &[STREAM_SPLIT]));
    let (train, val) = stratified_split(frame.labels()?, config.validation_fraction, &mut rng);
    Ok((frame.select_rows(&train), frame.select_rows(&val)))
}

#[derive(Debug, Serialize)]
pub struct TrainReport {
    pub base_classifiers: usize,
    pub gammas: Vec<f64>,
    pub layer_sizes: Vec<usize>,
    pub training_rows: usize,
    pub validation_rows: usize,
    pub validation_confusion: ConfusionMatrix,
    pub validation_metrics: MetricsReport,
}

/// Fits one ensemble on a stratified train/validation holdout and saves
/// `model.json` plus `train_report.json`.
pub fn train(config: &RunConfig, exec: Execution) -> Result<(BSACModel, TrainReport)> {
    let kind = config.dataset()?;
    let input = config.input()?;
    let (frame, _) = load_frame(kind, input, &config.label_column, true)?;
    let (train_frame, val_frame) = holdout(config, &frame)?;
    let params = train_frame.fit()?;
    let train = train_frame.dataset(&params)?;
    let val = val_frame.dataset(&params)?;
    let sa = config.sa_config(kind, params.width());
    sa.validate()?;

    let mut model = train_bsac(&train, &val, &sa, &config.gamma_grid, &mut Rng::new(config.seed), exec)?;
    model.preprocess = Some(params);
    model.metadata = ModelMetadata {
        seed: config.seed,
        dataset: kind.name().to_string(),
        fold: None,
    };
    let (predicted, _) = model.predict(&val.features, exec)?;
    let cm = confusion(&val.labels, &predicted)?;
    let report = TrainReport {
        base_classifiers: model.base_models.len(),
        gammas: model.gammas.clone(),
        layer_sizes: sa.layer_sizes.clone(),
        training_rows: train.rows(),
        validation_rows: val.rows(),
        validation_confusion: cm,
        validation_metrics: metrics(&cm)?,
    };

    let archive = ModelArchive::new(
        &model,
        config,
        ArchiveMetadata {
            seed: config.seed,
            timestamp: timestamp(),
            dataset: kind.name().to_string(),
            dataset_sha256: fingerprint(input)?,
            training_rows: train.rows(),
            validation_rows: val.rows(),
        },
    )?;
    let out = OutputDir::create(&config.out)?;
    archive.save(&out, MODEL_FILE)?;
    out.write("train_report.json", to_json(&report).as_bytes())?;
    Ok((model, report))
}

/// Per-row predictions: source row index, label and positive vote share.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub rows: Vec<usize>,
    pub labels: Vec<u8>,
    pub positive_fraction: Vec<f64>,
}

impl Predictions {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,label,positive_vote_fraction\n");
        for ((r, l), f) in self.rows.iter().zip(&self.labels).zip(&self.positive_fraction) {
            s.push_str(&format!("{r},{l},{f}\n"));
        }
        s
    }
}

/// Applies the model's stored preprocessing to `frame` and votes.
pub fn predict_frame(model: &BSACModel, frame: &FeatureFrame, exec: Execution) -> Result<Predictions> {
    let params = model
        .preprocess
        .as_ref()
        .ok_or_else(|| CliError::Config("model has no preprocessing parameters".into()))?;
    let missing: Vec<String> = params
        .source_columns()
        .into_iter()
        .filter(|c| frame.table.index_of(c).is_none())
        .map(str::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::FeatureMismatch(missing));
    }
    let features = frame.features(params)?;
    let (labels, positive_fraction) = model.predict(&features, exec)?;
    Ok(Predictions {
        rows: frame.source_rows.clone(),
        labels,
        positive_fraction,
    })
}

/// Loads an archive, predicts every usable row of the input and writes
/// `predictions.csv`.
pub fn predict(config: &RunConfig, model_path: &Path, exec: Execution) -> Result<Predictions> {
    let archive = ModelArchive::load(model_path)?;
    let model = archive.to_model(model_path)?;
    let kind = archive.config.dataset()?;
    let frame = match load_frame(kind, config.input()?, &archive.config.label_column, false) {
        Err(CliError::Core(bsac::Error::MissingColumns(names))) => return Err(CliError::FeatureMismatch(names)),
        other => other?.0,
    };
    let predictions = predict_frame(&model, &frame, exec)?;
    OutputDir::create(&config.out)?.write(PREDICTIONS_FILE, predictions.to_csv().as_bytes())?;
    Ok(predictions)
}

#[derive(Debug, Serialize)]
struct CvMetadata<'a> {
    timestamp: u64,
    elapsed_seconds: f64,
    dataset: &'static str,
    dataset_sha256: String,
    rows: usize,
    config: &'a RunConfig,
}

/// Stratified k-fold evaluation. Writes `cv_report.txt`, `cv_report.csv`,
/// `gamma_sweep.csv` (every fold, subset and gamma) and `cv_metadata.json`.
/// Only the metadata file carries run-specific values such as timestamps.
pub fn cv(config: &RunConfig, exec: Execution) -> Result<CVReport> {
    let started = std::time::Instant::now();
    let kind = config.dataset()?;
    let input = config.input()?;
    let (frame, _) = load_frame(kind, input, &config.label_column, true)?;
    let width = frame.fit()?.width();
    let sa = config.sa_config(kind, width);
    sa.validate()?;
    let outcome = run_cv(&frame, &sa, &config.gamma_grid, config.folds, &mut Rng::new(config.seed), exec)?;

    let out = OutputDir::create(&config.out)?;
    out.write("cv_report.txt", report::cv_table(&outcome.report).as_bytes())?;
    out.write("cv_report.csv", report::cv_csv(&outcome.report).as_bytes())?;
    out.write("gamma_sweep.csv", report::fold_sweep_csv(&outcome.sweep).as_bytes())?;
    let meta = CvMetadata {
        timestamp: timestamp(),
        elapsed_seconds: started.elapsed().as_secs_f64(),
        dataset: kind.name(),
        dataset_sha256: fingerprint(input)?,
        rows: frame.rows(),
        config,
    };
    out.write("cv_metadata.json", to_json(&meta).as_bytes())?;
    Ok(outcome.report)
}

/// Validation F1 of every (subset, gamma) candidate on the same holdout
/// `train` uses; writes `gamma_sweep.csv`.
pub fn sweep(config: &RunConfig, exec: Execution) -> Result<Vec<bsac::eval::SweepRow>> {
    let kind = config.dataset()?;
    let (frame, _) = load_frame(kind, config.input()?, &config.label_column, true)?;
    let (train_frame, val_frame) = holdout(config, &frame)?;
    let params = train_frame.fit()?;
    let train = train_frame.dataset(&params)?;
    let val = val_frame.dataset(&params)?;
    let sa = config.sa_config(kind, params.width());
    sa.validate()?;
    let rows = gamma_sweep(&train, &val, &sa, &config.gamma_grid, &mut Rng::new(config.seed), exec)?;
    OutputDir::create(&config.out)?.write("gamma_sweep.csv", report::sweep_csv(&rows).as_bytes())?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_stratified_and_disjoint() {
        let labels: Vec<f64> = (0..100).map(|i| f64::from(u8::from(i % 5 == 0))).collect();
        let (train, val) = stratified_split(&labels, 0.2, &mut Rng::new(1));
        assert_eq!(val.len(), 20);
        assert_eq!(val.iter().filter(|&&i| labels[i] == 1.0).count(), 4);
        let mut all = [train, val].concat();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn split_keeps_a_member_of_each_class_on_both_sides() {
        let labels = [1.0, 1.0, 0.0, 0.0, 0.0];
        let (train, val) = stratified_split(&labels, 0.01, &mut Rng::new(0));
        assert_eq!((train.len(), val.len()), (3, 2));
    }
}
