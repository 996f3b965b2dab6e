//! CSV ingestion, preprocessing and the dataset preparation pipelines.

mod lending_club;
mod preprocess;
mod table;
mod taiwan;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use lending_club::{
    lending_club_frame, parse_emp_length, prepare_lending_club, LendingClubReport, LC_DATE_COLUMNS,
};
pub use preprocess::{apply_preprocess, fit_preprocess, ColumnParams, FeatureKind, FeatureSpec, PreprocessParams};
pub use table::{drop_high_missing, load_csv, read_csv, Column, RawTable, YearMonth};
pub use taiwan::{prepare_taiwan, taiwan_frame, taiwan_schema, TAIWAN_LABEL};

use crate::error::{Error, Result};
use crate::nn::Matrix;

/// Model-ready data: scaled/encoded features and binary labels (1 = default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<f64>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<f64>, feature_names: Vec<String>) -> Result<Self> {
        if features.cols() != feature_names.len() {
            return Err(Error::shape("Dataset feature names", features.cols(), feature_names.len()));
        }
        if features.rows() != labels.len() {
            return Err(Error::shape("Dataset labels", features.rows(), labels.len()));
        }
        crate::autoencoder::check_binary(&labels)?;
        Ok(Dataset {
            features,
            labels,
            feature_names,
        })
    }

    pub fn rows(&self) -> usize {
        self.features.rows()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1.0).count()
    }

    /// Writes `feature_names..., label` as CSV with round-trippable floats.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = self.feature_names.join(",");
        header.push_str(",label");
        writeln!(out, "{header}")?;
        let mut line = String::new();
        for r in 0..self.rows() {
            line.clear();
            for v in self.features.row(r) {
                line.push_str(&format!("{v:?},"));
            }
            line.push_str(if self.labels[r] == 1.0 { "1" } else { "0" });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Feature source columns plus labels, before fitting preprocessing.
///
/// Cross-validation refits preprocessing per fold on training rows only, so
/// it works on frames rather than on already-scaled datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    pub table: RawTable,
    pub schema: Vec<FeatureSpec>,
    pub labels: Option<Vec<f64>>,
    /// Row index in the original input for each frame row.
    pub source_rows: Vec<usize>,
}

impl FeatureFrame {
    pub fn new(table: RawTable, schema: Vec<FeatureSpec>, labels: Option<Vec<f64>>, source_rows: Vec<usize>) -> Result<Self> {
        let names: Vec<&str> = schema.iter().map(|s| s.name.as_str()).collect();
        table.require_all(&names)?;
        if let Some(y) = &labels {
            if y.len() != table.n_rows() {
                return Err(Error::shape("FeatureFrame labels", table.n_rows(), y.len()));
            }
            crate::autoencoder::check_binary(y)?;
        }
        if source_rows.len() != table.n_rows() {
            return Err(Error::shape("FeatureFrame source rows", table.n_rows(), source_rows.len()));
        }
        Ok(FeatureFrame {
            table,
            schema,
            labels,
            source_rows,
        })
    }

    pub fn rows(&self) -> usize {
        self.table.n_rows()
    }

    pub fn labels(&self) -> Result<&[f64]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("frame has no labels".into()))
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureFrame {
        FeatureFrame {
            table: self.table.select_rows(rows),
            schema: self.schema.clone(),
            labels: self.labels.as_ref().map(|y| rows.iter().map(|&i| y[i]).collect()),
            source_rows: rows.iter().map(|&i| self.source_rows[i]).collect(),
        }
    }

    pub fn fit(&self) -> Result<PreprocessParams> {
        fit_preprocess(&self.table, &self.schema)
    }

    pub fn features(&self, params: &PreprocessParams) -> Result<Matrix> {
        apply_preprocess(&self.table, params)
    }

    pub fn dataset(&self, params: &PreprocessParams) -> Result<Dataset> {
        Dataset::new(self.features(params)?, self.labels()?.to_vec(), params.feature_names())
    }
}

pub(crate) fn parse_label(col: &Column, row: usize, column: &str) -> Result<Option<f64>> {
    let v = col.number(row).map_err(|message| Error::Parse {
        column: column.to_string(),
        row,
        message,
    })?;
    match v {
        None => Ok(None),
        Some(y) if y == 0.0 || y == 1.0 => Ok(Some(y)),
        Some(y) => Err(Error::InvalidLabel { index: row, value: y }),
    }
}

/// A frame over an arbitrary CSV: `label_column` holds 0/1 labels, numeric
/// columns are continuous and all other columns categorical.
pub fn generic_frame(table: &RawTable, label_column: &str, require_label: bool) -> Result<FeatureFrame> {
    let label_col = table.column(label_column);
    if require_label && label_col.is_none() {
        return Err(Error::MissingColumns(vec![label_column.to_string()]));
    }
    let mut keep = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    for row in 0..table.n_rows() {
        if let (Some(col), Some(y)) = (label_col, labels.as_mut()) {
            match parse_label(col, row, label_column)? {
                Some(v) => y.push(v),
                None => {
                    return Err(Error::Parse {
                        column: label_column.to_string(),
                        row,
                        message: "missing label".into(),
                    })
                }
            }
        }
        keep.push(row);
    }
    let mut names = Vec::new();
    let mut columns = Vec::new();
    let mut schema = Vec::new();
    for (name, col) in table.names().iter().zip(table.columns()) {
        if name == label_column {
            continue;
        }
        schema.push(match col {
            Column::Numeric(_) => FeatureSpec::continuous(name),
            _ => FeatureSpec::categorical(name),
        });
        names.push(name.clone());
        columns.push(col.clone());
    }
    FeatureFrame::new(RawTable::new(names, columns)?, schema, labels, keep)
}
