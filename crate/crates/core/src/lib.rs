//! Bagging supervised autoencoder classifier (BSAC) for imbalanced binary
//! classification.
//!
//! The crate is organised bottom-up:
//!
//! - [`nn`]: a small dense feed-forward engine (matrices, layers, losses,
//!   backpropagation, Adam, Glorot initialisation, finite-difference checks).
//! - [`autoencoder`]: the supervised autoencoder base learner trained on
//!   `gamma * L_r + (1 - gamma) * L_p`.
//! - [`ensemble`]: balanced undersampled subsets, per-subset gamma
//!   selection and majority voting.
//! - [`eval`]: confusion-matrix metrics, stratified folds, cross-validation
//!   and the gamma sweep.
//! - [`data`]: CSV ingestion, fit/apply preprocessing and the Taiwan and
//!   Lending Club preparation pipelines.
//!
//! Data-parallel loops go through [`exec::Execution`]; with the `parallel`
//! feature disabled every loop runs sequentially and produces identical
//! results.

pub mod autoencoder;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod exec;
pub mod nn;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
