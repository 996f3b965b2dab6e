//! The UCI "default of credit card clients" (Taiwan) data.
//!
//! 23 explanatory columns plus the target. SEX, EDUCATION and MARRIAGE are
//! indicator-encoded against fixed code lists; the other 20 columns are
//! min-max scaled, giving 32 feature columns. MARRIAGE code 0 (undocumented,
//! ~0.2% of rows) is folded into 3 ("others").

use super::preprocess::{FeatureSpec, PreprocessParams};
use super::table::{Column, RawTable};
use super::{parse_label, Dataset, FeatureFrame};
use crate::error::{Error, Result};

pub const TAIWAN_LABEL: &str = "default payment next month";
const LABEL_ALIASES: [&str; 3] = [TAIWAN_LABEL, "default.payment.next.month", "Y"];

const CONTINUOUS_HEAD: [&str; 2] = ["LIMIT_BAL", "AGE"];
const PAY: [&str; 6] = ["PAY_0", "PAY_2", "PAY_3", "PAY_4", "PAY_5", "PAY_6"];
const BILL: [&str; 6] = ["BILL_AMT1", "BILL_AMT2", "BILL_AMT3", "BILL_AMT4", "BILL_AMT5", "BILL_AMT6"];
const PAY_AMT: [&str; 6] = ["PAY_AMT1", "PAY_AMT2", "PAY_AMT3", "PAY_AMT4", "PAY_AMT5", "PAY_AMT6"];

/// Feature schema in source-column order.
pub fn taiwan_schema() -> Vec<FeatureSpec> {
    let mut s = vec![
        FeatureSpec::continuous(CONTINUOUS_HEAD[0]),
        FeatureSpec::categorical_fixed("SEX", &["1", "2"]),
        FeatureSpec::categorical_fixed("EDUCATION", &["0", "1", "2", "3", "4", "5", "6"]),
        FeatureSpec::categorical_fixed("MARRIAGE", &["1", "2", "3"]),
        FeatureSpec::continuous(CONTINUOUS_HEAD[1]),
    ];
    s.extend(PAY.iter().chain(&BILL).chain(&PAY_AMT).map(|n| FeatureSpec::continuous(n)));
    s
}

/// Some CSV exports rename `PAY_0` to `PAY_1`.
fn source_name<'a>(table: &RawTable, canonical: &'a str) -> &'a str {
    if canonical == "PAY_0" && table.index_of("PAY_0").is_none() && table.index_of("PAY_1").is_some() {
        "PAY_1"
    } else {
        canonical
    }
}

/// Extracts the Taiwan feature frame. With `require_label` the target column
/// must be present; otherwise it is read when present.
pub fn taiwan_frame(table: &RawTable, require_label: bool) -> Result<FeatureFrame> {
    let schema = taiwan_schema();
    let missing: Vec<String> = schema
        .iter()
        .map(|s| source_name(table, &s.name))
        .filter(|n| table.index_of(n).is_none())
        .map(str::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }
    let label_name = LABEL_ALIASES.iter().find(|n| table.index_of(n).is_some());
    if require_label && label_name.is_none() {
        return Err(Error::MissingColumns(vec![TAIWAN_LABEL.to_string()]));
    }

    let mut names = Vec::with_capacity(schema.len());
    let mut columns = Vec::with_capacity(schema.len());
    for spec in &schema {
        let col = table.require(source_name(table, &spec.name))?;
        let col = if spec.name == "MARRIAGE" {
            Column::Categorical(
                (0..col.len())
                    .map(|r| col.category(r).map(|c| if c == "0" { "3".to_string() } else { c }))
                    .collect(),
            )
        } else {
            col.clone()
        };
        names.push(spec.name.clone());
        columns.push(col);
    }

    let labels = match label_name {
        None => None,
        Some(name) => {
            let col = table.require(name)?;
            let mut y = Vec::with_capacity(col.len());
            for row in 0..col.len() {
                y.push(parse_label(col, row, name)?.ok_or_else(|| Error::Parse {
                    column: name.to_string(),
                    row,
                    message: "missing label".into(),
                })?);
            }
            Some(y)
        }
    };
    let rows = table.n_rows();
    FeatureFrame::new(RawTable::new(names, columns)?, schema, labels, (0..rows).collect())
}

/// Frame extraction plus preprocessing fit on the whole table.
pub fn prepare_taiwan(table: &RawTable) -> Result<(Dataset, PreprocessParams)> {
    let frame = taiwan_frame(table, true)?;
    let params = frame.fit()?;
    Ok((frame.dataset(&params)?, params))
}
