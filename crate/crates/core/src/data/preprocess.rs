//! Fit/apply feature preprocessing: min-max scaling of continuous columns
//! and one indicator column per category for categorical columns.

use serde::{Deserialize, Serialize};

use super::table::{Column, RawTable};
use crate::error::{Error, Result};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    /// `categories: None` means "whatever appears in the fitting data",
    /// sorted; a fixed list pins the indicator layout regardless of data.
    Categorical { categories: Option<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn continuous(name: &str) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind: FeatureKind::Continuous,
        }
    }

    pub fn categorical(name: &str) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind: FeatureKind::Categorical { categories: None },
        }
    }

    pub fn categorical_fixed(name: &str, categories: &[&str]) -> Self {
        FeatureSpec {
            name: name.to_string(),
            kind: FeatureKind::Categorical {
                categories: Some(categories.iter().map(|c| c.to_string()).collect()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnParams {
    Continuous { name: String, min: f64, max: f64 },
    Categorical { name: String, categories: Vec<String> },
}

impl ColumnParams {
    pub fn name(&self) -> &str {
        match self {
            ColumnParams::Continuous { name, .. } | ColumnParams::Categorical { name, .. } => name,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            ColumnParams::Continuous { .. } => 1,
            ColumnParams::Categorical { categories, .. } => categories.len(),
        }
    }
}

/// Everything needed to turn a raw table into the feature matrix. The
/// emitted column layout is a pure function of these parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessParams {
    pub columns: Vec<ColumnParams>,
}

impl PreprocessParams {
    pub fn width(&self) -> usize {
        self.columns.iter().map(ColumnParams::width).sum()
    }

    /// Continuous columns keep their name; indicators are `<column>_<category>`.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        for c in &self.columns {
            match c {
                ColumnParams::Continuous { name, .. } => names.push(name.clone()),
                ColumnParams::Categorical { name, categories } => {
                    names.extend(categories.iter().map(|cat| format!("{name}_{cat}")))
                }
            }
        }
        names
    }

    /// Source column names, in emission order.
    pub fn source_columns(&self) -> Vec<&str> {
        self.columns.iter().map(ColumnParams::name).collect()
    }
}

fn numeric_values(table: &RawTable, name: &str) -> Result<Vec<Option<f64>>> {
    let col = table.require(name)?;
    (0..col.len())
        .map(|row| {
            col.number(row).map_err(|message| Error::Parse {
                column: name.to_string(),
                row,
                message,
            })
        })
        .collect()
}

/// Learns min/max per continuous column and category lists per categorical
/// column from `table`. Only columns named in `schema` are read.
pub fn fit_preprocess(table: &RawTable, schema: &[FeatureSpec]) -> Result<PreprocessParams> {
    let names: Vec<&str> = schema.iter().map(|s| s.name.as_str()).collect();
    table.require_all(&names)?;
    let mut columns = Vec::with_capacity(schema.len());
    for spec in schema {
        match &spec.kind {
            FeatureKind::Continuous => {
                let values = numeric_values(table, &spec.name)?;
                let mut present = values.iter().flatten().copied().peekable();
                if present.peek().is_none() {
                    return Err(Error::InvalidArgument(format!("column {} has no values to fit", spec.name)));
                }
                let (min, max) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                columns.push(ColumnParams::Continuous {
                    name: spec.name.clone(),
                    min,
                    max,
                });
            }
            FeatureKind::Categorical { categories } => {
                let categories = match categories {
                    Some(fixed) => fixed.clone(),
                    None => {
                        let col = table.require(&spec.name)?;
                        let mut cats: Vec<String> = (0..col.len()).filter_map(|r| col.category(r)).collect();
                        cats.sort();
                        cats.dedup();
                        cats
                    }
                };
                if categories.is_empty() {
                    return Err(Error::InvalidArgument(format!("column {} has no categories", spec.name)));
                }
                columns.push(ColumnParams::Categorical {
                    name: spec.name.clone(),
                    categories,
                });
            }
        }
    }
    Ok(PreprocessParams { columns })
}

/// Builds the feature matrix. Scaled values are not clamped, so unseen data
/// may fall outside `[0, 1]`; zero-range columns map to 0; unseen or missing
/// categories give an all-zero indicator block. Missing continuous values
/// are an error.
pub fn apply_preprocess(table: &RawTable, params: &PreprocessParams) -> Result<Matrix> {
    table.require_all(&params.source_columns())?;
    let rows = table.n_rows();
    let width = params.width();
    let mut out = Matrix::zeros(rows, width);
    let mut offset = 0;
    for c in &params.columns {
        match c {
            ColumnParams::Continuous { name, min, max } => {
                let values = numeric_values(table, name)?;
                let range = max - min;
                for (row, v) in values.into_iter().enumerate() {
                    let v = v.ok_or_else(|| Error::Parse {
                        column: name.clone(),
                        row,
                        message: "missing value in continuous feature".into(),
                    })?;
                    let scaled = if range > 0.0 { (v - min) / range } else { 0.0 };
                    out.set(row, offset, scaled);
                }
            }
            ColumnParams::Categorical { name, categories } => {
                let col: &Column = table.require(name)?;
                for row in 0..rows {
                    if let Some(cat) = col.category(row) {
                        if let Some(j) = categories.iter().position(|k| *k == cat) {
                            out.set(row, offset + j, 1.0);
                        }
                    }
                }
            }
        }
        offset += c.width();
    }
    Ok(out)
}
