//! Metrics, stratified folds, cross-validation and the gamma sweep.

mod cv;
mod folds;
mod metrics;

pub use cv::{gamma_sweep, resolve_architecture, run_cv, CVReport, CvOutcome, FoldResult, FoldSweepRow, MetricSummary};
pub use folds::{fold_members, rotation, stratified_kfold};
pub use metrics::{confusion, g_mean, metrics, ConfusionMatrix, MetricsReport};
pub use crate::ensemble::SweepRow;
