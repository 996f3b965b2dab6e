//! Self-describing JSON model archive.
//!
//! Weights and biases are stored as decimal strings with 17 significant
//! digits, which round-trip every finite `f64` exactly.

use std::path::{Path, PathBuf};

use bsac::autoencoder::SAModel;
use bsac::data::PreprocessParams;
use bsac::ensemble::{BSACModel, ModelMetadata};
use bsac::nn::{Activation, DenseLayer, Matrix, Network};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::OutputDir;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub fan_in: usize,
    pub fan_out: usize,
    pub activation: Activation,
    /// Row-major `[fan_in x fan_out]`.
    pub weights: Vec<String>,
    pub bias: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseModelRecord {
    pub gamma: f64,
    pub layer_sizes: Vec<usize>,
    pub encoder: Vec<LayerRecord>,
    pub head: Vec<LayerRecord>,
    pub decoder: Vec<LayerRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMetadata {
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub dataset: String,
    /// SHA-256 of the input file bytes.
    pub dataset_sha256: String,
    pub training_rows: usize,
    pub validation_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u64,
    pub config: RunConfig,
    pub preprocess: PreprocessParams,
    pub base_models: Vec<BaseModelRecord>,
    pub metadata: ArchiveMetadata,
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn encode_network(net: &Network) -> Vec<LayerRecord> {
    net.layers
        .iter()
        .map(|l| LayerRecord {
            fan_in: l.fan_in(),
            fan_out: l.fan_out(),
            activation: l.activation,
            weights: l.weights.as_slice().iter().map(|&w| format_f64(w)).collect(),
            bias: l.bias.iter().map(|&b| format_f64(b)).collect(),
        })
        .collect()
}

fn parse_values(values: &[String], what: &str) -> std::result::Result<Vec<f64>, String> {
    values
        .iter()
        .map(|v| v.parse::<f64>().map_err(|_| format!("{what}: `{v}` is not a number")))
        .collect()
}

fn decode_network(records: &[LayerRecord]) -> std::result::Result<Network, String> {
    let layers = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let weights = parse_values(&r.weights, "weights")?;
            let w = Matrix::from_vec(r.fan_in, r.fan_out, weights).map_err(|e| format!("layer {i}: {e}"))?;
            DenseLayer::new(w, parse_values(&r.bias, "bias")?, r.activation).map_err(|e| format!("layer {i}: {e}"))
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Network::new(layers).map_err(|e| e.to_string())
}

impl ModelArchive {
    pub fn new(model: &BSACModel, config: &RunConfig, metadata: ArchiveMetadata) -> Result<Self> {
        let preprocess = model
            .preprocess
            .clone()
            .ok_or_else(|| CliError::Config("model has no preprocessing parameters".into()))?;
        let base_models = model
            .base_models
            .iter()
            .map(|m| BaseModelRecord {
                gamma: m.gamma,
                layer_sizes: m.layer_sizes(),
                encoder: encode_network(&m.encoder),
                head: encode_network(&m.head),
                decoder: encode_network(&m.decoder),
            })
            .collect();
        Ok(ModelArchive {
            format_version: FORMAT_VERSION,
            config: config.clone(),
            preprocess,
            base_models,
            metadata,
        })
    }

    /// Rebuilds the in-memory ensemble.
    pub fn to_model(&self, path: &Path) -> Result<BSACModel> {
        let fail = |message: String| CliError::Archive {
            path: path.to_path_buf(),
            message,
        };
        let mut base_models = Vec::with_capacity(self.base_models.len());
        for (i, r) in self.base_models.iter().enumerate() {
            let context = |e: String| fail(format!("base model {i}: {e}"));
            let model = SAModel {
                encoder: decode_network(&r.encoder).map_err(context)?,
                decoder: decode_network(&r.decoder).map_err(context)?,
                head: decode_network(&r.head).map_err(context)?,
                gamma: r.gamma,
                history: Default::default(),
            };
            if model.layer_sizes() != r.layer_sizes {
                return Err(fail(format!(
                    "base model {i}: layers {:?} do not match recorded sizes {:?}",
                    model.layer_sizes(),
                    r.layer_sizes
                )));
            }
            if model.input_dim() != self.preprocess.width() {
                return Err(fail(format!(
                    "base model {i} expects {} features, preprocessing yields {}",
                    model.input_dim(),
                    self.preprocess.width()
                )));
            }
            base_models.push(model);
        }
        if base_models.is_empty() {
            return Err(fail("no base models".into()));
        }
        Ok(BSACModel {
            gammas: base_models.iter().map(|m| m.gamma).collect(),
            base_models,
            preprocess: Some(self.preprocess.clone()),
            metadata: ModelMetadata {
                seed: self.metadata.seed,
                dataset: self.metadata.dataset.clone(),
                fold: None,
            },
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("archive serialises");
        s.push('\n');
        s
    }

    /// Parses an archive, checking the format version before anything else.
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let fail = |message: String| CliError::Archive {
            path: path.to_path_buf(),
            message,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| fail(e.to_string()))?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| fail("missing format_version".into()))?;
        if found != FORMAT_VERSION {
            return Err(CliError::ArchiveVersion {
                path: path.to_path_buf(),
                found,
                expected: FORMAT_VERSION,
            });
        }
        serde_json::from_value(value).map_err(|e| fail(e.to_string()))
    }

    pub fn save(&self, out: &OutputDir, name: &str) -> Result<PathBuf> {
        out.write(name, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(CliError::MissingInput(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        ModelArchive::from_json(&text, path)
    }
}
