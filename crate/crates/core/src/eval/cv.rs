use serde::{Deserialize, Serialize};

use super::folds::{rotation, stratified_kfold};
use super::metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
use crate::autoencoder::SAConfig;
use crate::data::{Dataset, FeatureFrame};
use crate::ensemble::{train_bsac_with_sweep, SweepRow};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::nn::{derive_seed, Rng};

const STREAM_FOLDS: u64 = 0xf0;
const STREAM_ROTATION: u64 = 0xf1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub validation_fold: usize,
    pub train_rows: usize,
    pub validation_rows: usize,
    pub test_rows: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    /// Selected gamma per base classifier.
    pub gammas: Vec<f64>,
}

/// One value per reported metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub g_mean: f64,
}

impl MetricSummary {
    fn from_report(m: &MetricsReport) -> Self {
        MetricSummary {
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            specificity: m.specificity,
            f1: m.f1,
            g_mean: m.g_mean,
        }
    }

    fn to_array(self) -> [f64; 6] {
        [self.accuracy, self.precision, self.recall, self.specificity, self.f1, self.g_mean]
    }

    fn from_array(a: [f64; 6]) -> Self {
        MetricSummary {
            accuracy: a[0],
            precision: a[1],
            recall: a[2],
            specificity: a[3],
            f1: a[4],
            g_mean: a[5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVReport {
    pub folds: Vec<FoldResult>,
    pub mean: MetricSummary,
    /// Population standard deviation over folds.
    pub std: MetricSummary,
}

impl CVReport {
    pub fn from_folds(folds: Vec<FoldResult>) -> Result<Self> {
        if folds.is_empty() {
            return Err(Error::Empty("fold results"));
        }
        let k = folds.len() as f64;
        let rows: Vec<[f64; 6]> = folds.iter().map(|f| MetricSummary::from_report(&f.metrics).to_array()).collect();
        let mut mean = [0.0; 6];
        for r in &rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v / k;
            }
        }
        let mut var = [0.0; 6];
        for r in &rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m) / k;
            }
        }
        Ok(CVReport {
            folds,
            mean: MetricSummary::from_array(mean),
            std: MetricSummary::from_array(var.map(f64::sqrt)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldSweepRow {
    pub fold: usize,
    pub subset_id: usize,
    pub gamma: f64,
    pub f1: f64,
}

pub struct CvOutcome {
    pub report: CVReport,
    pub sweep: Vec<FoldSweepRow>,
}

/// Sets the outer layer sizes to the realised feature width. Returns the
/// architecture unchanged when it already matches.
pub fn resolve_architecture(layer_sizes: &[usize], width: usize) -> Vec<usize> {
    let mut sizes = layer_sizes.to_vec();
    if let (Some(&first), Some(&last)) = (sizes.first(), sizes.last()) {
        if first != width || last != width {
            log::warn!("architecture {layer_sizes:?} does not match {width} features; using {width} as input/output width");
            sizes[0] = width;
            let n = sizes.len();
            sizes[n - 1] = width;
        }
    }
    sizes
}

/// Stratified k-fold cross-validation of the bagged supervised autoencoder.
///
/// Rotation `i` tests on fold `i`, validates gamma on fold `(i + 1) mod k`
/// and trains on the remaining folds. Preprocessing is fit on the training
/// folds only. Each rotation gets its own derived seed, so results are the
/// same under either execution mode.
pub fn run_cv(
    frame: &FeatureFrame,
    base_config: &SAConfig,
    gamma_grid: &[f64],
    k: usize,
    rng: &mut Rng,
    exec: Execution,
) -> Result<CvOutcome> {
    let labels = frame.labels()?;
    let seed = rng.next_u64();
    let folds = stratified_kfold(labels, k, &mut Rng::new(derive_seed(seed, &[STREAM_FOLDS])))?;

    let results: Vec<Result<(FoldResult, Vec<FoldSweepRow>)>> = exec.map_range(k, |i| {
        let (train_idx, val_idx, test_idx) = rotation(&folds, k, i);
        let train_frame = frame.select_rows(&train_idx);
        let params = train_frame.fit()?;
        let train = train_frame.dataset(&params)?;
        let validation = frame.select_rows(&val_idx).dataset(&params)?;
        let test = frame.select_rows(&test_idx).dataset(&params)?;

        let config = SAConfig {
            layer_sizes: resolve_architecture(&base_config.layer_sizes, params.width()),
            ..base_config.clone()
        };
        let mut fold_rng = Rng::new(derive_seed(seed, &[STREAM_ROTATION, i as u64]));
        let trained = train_bsac_with_sweep(&train, &validation, &config, gamma_grid, &mut fold_rng, exec)?;
        let (predicted, _) = trained.model.predict(&test.features, exec)?;
        let cm = confusion(&test.labels, &predicted)?;
        log::info!(
            "fold {i}: {} base classifiers, gammas {:?}, test {cm:?}",
            trained.model.base_models.len(),
            trained.model.gammas
        );
        let result = FoldResult {
            fold: i,
            validation_fold: (i + 1) % k,
            train_rows: train.rows(),
            validation_rows: validation.rows(),
            test_rows: test.rows(),
            confusion: cm,
            metrics: metrics(&cm)?,
            gammas: trained.model.gammas.clone(),
        };
        let sweep = trained
            .sweep
            .iter()
            .map(|r| FoldSweepRow {
                fold: i,
                subset_id: r.subset_id,
                gamma: r.gamma,
                f1: r.f1,
            })
            .collect();
        Ok((result, sweep))
    });

    let mut fold_results = Vec::with_capacity(k);
    let mut sweep = Vec::new();
    for r in results {
        let (f, s) = r?;
        fold_results.push(f);
        sweep.extend(s);
    }
    Ok(CvOutcome {
        report: CVReport::from_folds(fold_results)?,
        sweep,
    })
}

/// Validation F1 for every `(subset, gamma)` candidate, exactly as
/// `train_bsac` computes it for the same `rng` state.
pub fn gamma_sweep(
    train: &Dataset,
    validation: &Dataset,
    base_config: &SAConfig,
    gamma_grid: &[f64],
    rng: &mut Rng,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    Ok(train_bsac_with_sweep(train, validation, base_config, gamma_grid, rng, exec)?.sweep)
}
