//! Lending Club accepted-loans preparation.
//!
//! Keeps 36-month loans issued before March 2016 whose status is resolved
//! (`Fully Paid` → 0, `Charged Off`/`Default` → 1), drops columns with more
//! than half their values missing, engineers `average_fico` and
//! `credit_history` (whole months from `earliest_cr_line` to `issue_d`),
//! and keeps the variables below. Rows still missing any kept variable are
//! dropped.

use serde::{Deserialize, Serialize};

use super::preprocess::{FeatureSpec, PreprocessParams};
use super::table::{drop_high_missing, Column, RawTable, YearMonth};
use super::{Dataset, FeatureFrame};
use crate::error::{Error, Result};

/// Columns to load as dates.
pub const LC_DATE_COLUMNS: [&str; 2] = ["issue_d", "earliest_cr_line"];

const CUTOFF: YearMonth = YearMonth { year: 2016, month: 3 };
const MISSING_THRESHOLD: f64 = 0.5;

/// Continuous variables read directly from the file.
const DIRECT: [&str; 17] = [
    "loan_amnt",
    "acc_now_delinq",
    "int_rate",
    "installment",
    "annual_inc",
    "dti",
    "delinq_2yrs",
    "inq_last_6mths",
    "open_acc",
    "pub_rec",
    "revol_util",
    "total_acc",
    "chargeoff_within_12_mths",
    "delinq_amnt",
    "mort_acc",
    "pub_rec_bankruptcies",
    "tax_liens",
];

const CATEGORICAL: [&str; 6] = [
    "grade",
    "sub_grade",
    "home_ownership",
    "purpose",
    "verification_status",
    "initial_list_status",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LendingClubReport {
    pub input_rows: usize,
    /// Rows removed for term ≠ 36 months or issue date ≥ 2016-03.
    pub out_of_window_rows: usize,
    /// Rows in the window whose status has no resolved outcome.
    pub unresolved_status_rows: usize,
    pub dropped_columns: Vec<String>,
    /// Kept variables lost to the missing-value column filter.
    pub lost_features: Vec<String>,
    pub incomplete_rows: usize,
    pub output_rows: usize,
}

/// `"< 1 year"` → 0, `"10+ years"` → 10, `"3 years"` → 3, `"n/a"` → missing.
pub fn parse_emp_length(s: &str) -> Option<f64> {
    let t = s.trim().to_ascii_lowercase();
    if t.starts_with('<') {
        return Some(0.0);
    }
    let digits: String = t.chars().take_while(char::is_ascii_digit).collect();
    digits.parse::<f64>().ok()
}

fn status_label(status: &str) -> Option<f64> {
    match status.trim() {
        "Fully Paid" => Some(0.0),
        "Charged Off" | "Default" => Some(1.0),
        _ => None,
    }
}

fn date_at(col: &Column, row: usize, name: &str) -> Result<Option<YearMonth>> {
    match col {
        Column::Date(v) => Ok(v[row]),
        _ => match col.category(row) {
            None => Ok(None),
            Some(s) => YearMonth::parse(&s).map(Some).ok_or_else(|| Error::Parse {
                column: name.to_string(),
                row,
                message: format!("unparseable date {s:?}"),
            }),
        },
    }
}

fn number_at(col: &Column, row: usize, name: &str) -> Result<Option<f64>> {
    col.number(row).map_err(|message| Error::Parse {
        column: name.to_string(),
        row,
        message,
    })
}

/// Builds the Lending Club feature frame. With `require_label`, rows are
/// also filtered to resolved statuses and labelled; otherwise the status
/// column is ignored.
pub fn lending_club_frame(table: &RawTable, require_label: bool) -> Result<(FeatureFrame, LendingClubReport)> {
    let mut required: Vec<&str> = vec![
        "term",
        "issue_d",
        "earliest_cr_line",
        "fico_range_low",
        "fico_range_high",
        "emp_length",
    ];
    required.extend(DIRECT);
    required.extend(CATEGORICAL);
    if require_label {
        required.push("loan_status");
    }
    table.require_all(&required)?;

    let mut report = LendingClubReport {
        input_rows: table.n_rows(),
        ..Default::default()
    };

    let term = table.require("term")?;
    let issue = table.require("issue_d")?;
    let status = table.column("loan_status").filter(|_| require_label);
    let mut kept = Vec::new();
    let mut labels = Vec::new();
    for row in 0..table.n_rows() {
        let in_window = term.category(row).is_some_and(|t| t.trim().starts_with("36"))
            && date_at(issue, row, "issue_d")?.is_some_and(|d| d < CUTOFF);
        if !in_window {
            report.out_of_window_rows += 1;
            continue;
        }
        if let Some(status) = status {
            match status.category(row).as_deref().and_then(status_label) {
                Some(y) => labels.push(y),
                None => {
                    report.unresolved_status_rows += 1;
                    continue;
                }
            }
        }
        kept.push(row);
    }
    let filtered = table.select_rows(&kept);

    let (reduced, dropped) = drop_high_missing(&filtered, MISSING_THRESHOLD)?;
    report.dropped_columns = dropped;
    let has = |name: &str| reduced.index_of(name).is_some();

    // Engineered and parsed columns, in output order.
    let n = filtered.n_rows();
    let mut names: Vec<String> = Vec::new();
    let mut columns: Vec<Column> = Vec::new();
    let mut schema: Vec<FeatureSpec> = Vec::new();
    let mut push_continuous = |name: &str, values: Vec<Option<f64>>| {
        names.push(name.to_string());
        columns.push(Column::Numeric(values));
        schema.push(FeatureSpec::continuous(name));
    };

    for &name in DIRECT.iter().take(5) {
        if has(name) {
            let col = reduced.require(name)?;
            push_continuous(name, (0..n).map(|r| number_at(col, r, name)).collect::<Result<_>>()?);
        } else {
            report.lost_features.push(name.to_string());
        }
    }
    if has("emp_length") {
        let col = reduced.require("emp_length")?;
        let values = (0..n)
            .map(|r| match col {
                Column::Numeric(v) => v[r],
                _ => col.category(r).and_then(|s| parse_emp_length(&s)),
            })
            .collect();
        push_continuous("emp_length", values);
    } else {
        report.lost_features.push("emp_length".into());
    }
    for &name in &DIRECT[5..7] {
        if has(name) {
            let col = reduced.require(name)?;
            push_continuous(name, (0..n).map(|r| number_at(col, r, name)).collect::<Result<_>>()?);
        } else {
            report.lost_features.push(name.to_string());
        }
    }
    if has("fico_range_low") && has("fico_range_high") {
        let lo = reduced.require("fico_range_low")?;
        let hi = reduced.require("fico_range_high")?;
        let mut values = Vec::with_capacity(n);
        for r in 0..n {
            values.push(match (number_at(lo, r, "fico_range_low")?, number_at(hi, r, "fico_range_high")?) {
                (Some(a), Some(b)) => Some((a + b) / 2.0),
                _ => None,
            });
        }
        push_continuous("average_fico", values);
    } else {
        report.lost_features.push("average_fico".into());
    }
    for &name in &DIRECT[7..] {
        if has(name) {
            let col = reduced.require(name)?;
            push_continuous(name, (0..n).map(|r| number_at(col, r, name)).collect::<Result<_>>()?);
        } else {
            report.lost_features.push(name.to_string());
        }
    }
    if has("earliest_cr_line") {
        let first = reduced.require("earliest_cr_line")?;
        let issue = reduced.require("issue_d")?;
        let mut values = Vec::with_capacity(n);
        for r in 0..n {
            values.push(match (date_at(first, r, "earliest_cr_line")?, date_at(issue, r, "issue_d")?) {
                (Some(a), Some(b)) => Some(b.months_since(a) as f64),
                _ => None,
            });
        }
        push_continuous("credit_history", values);
    } else {
        report.lost_features.push("credit_history".into());
    }
    for &name in &CATEGORICAL {
        if has(name) {
            names.push(name.to_string());
            columns.push(reduced.require(name)?.clone());
            schema.push(FeatureSpec::categorical(name));
        } else {
            report.lost_features.push(name.to_string());
        }
    }

    let features = RawTable::new(names, columns)?;
    let complete: Vec<usize> = (0..n)
        .filter(|&r| features.columns().iter().all(|c| !c.is_missing(r)))
        .collect();
    report.incomplete_rows = n - complete.len();
    report.output_rows = complete.len();

    let labels = if require_label {
        Some(complete.iter().map(|&r| labels[r]).collect())
    } else {
        None
    };
    let source_rows = complete.iter().map(|&r| kept[r]).collect();
    let frame = FeatureFrame::new(features.select_rows(&complete), schema, labels, source_rows)?;
    Ok((frame, report))
}

/// Frame extraction plus preprocessing fit on all retained rows.
pub fn prepare_lending_club(table: &RawTable) -> Result<(Dataset, PreprocessParams, LendingClubReport)> {
    let (frame, report) = lending_club_frame(table, true)?;
    let params = frame.fit()?;
    Ok((frame.dataset(&params)?, params, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::read_csv;

    const HEADER: &str = "id,term,issue_d,loan_status,earliest_cr_line,fico_range_low,fico_range_high,emp_length,loan_amnt,acc_now_delinq,int_rate,installment,annual_inc,dti,delinq_2yrs,inq_last_6mths,open_acc,pub_rec,revol_util,total_acc,chargeoff_within_12_mths,delinq_amnt,mort_acc,pub_rec_bankruptcies,tax_liens,grade,sub_grade,home_ownership,purpose,verification_status,initial_list_status,mostly_empty";

    fn row(term: &str, issue: &str, status: &str, first: &str, emp: &str, mort: &str, empty: &str) -> String {
        format!(
            "1,{term},{issue},{status},{first},700,710,{emp},10000,0,13.5%,300.2,55000,18.2,0,1,9,0,45.1%,20,0,0,{mort},0,0,B,B3,RENT,debt_consolidation,Verified,f,{empty}"
        )
    }

    fn table(rows: &[String]) -> RawTable {
        let mut s = HEADER.to_string();
        for r in rows {
            s.push('\n');
            s.push_str(r);
        }
        s.push('\n');
        read_csv(s.as_bytes(), "lc", &LC_DATE_COLUMNS).unwrap()
    }

    #[test]
    fn filters_engineers_and_labels() {
        let t = table(&[
            row(" 36 months", "Jan-2015", "Fully Paid", "Jan-2000", "10+ years", "1", ""),
            row(" 36 months", "Feb-2016", "Charged Off", "Mar-2010", "< 1 year", "2", "x"),
            row(" 60 months", "Jan-2015", "Fully Paid", "Jan-2000", "3 years", "1", ""),
            row(" 36 months", "Mar-2016", "Fully Paid", "Jan-2000", "3 years", "1", ""),
            row(" 36 months", "Jan-2014", "Current", "Jan-2000", "3 years", "1", ""),
            row(" 36 months", "Jan-2014", "Default", "Jan-2000", "n/a", "1", ""),
            row(" 36 months", "Jan-2014", "Fully Paid", "Jan-2000", "2 years", "", ""),
        ]);
        let (frame, report) = lending_club_frame(&t, true).unwrap();
        assert_eq!(report.out_of_window_rows, 2);
        assert_eq!(report.unresolved_status_rows, 1);
        assert_eq!(report.dropped_columns, vec!["mostly_empty".to_string()]);
        assert_eq!(report.incomplete_rows, 2);
        assert_eq!(frame.source_rows, vec![0, 1]);
        assert_eq!(frame.labels().unwrap(), &[0.0, 1.0]);

        let col = |name: &str| frame.table.column(name).unwrap().clone();
        assert_eq!(col("average_fico"), Column::Numeric(vec![Some(705.0), Some(705.0)]));
        assert_eq!(col("credit_history"), Column::Numeric(vec![Some(180.0), Some(71.0)]));
        assert_eq!(col("emp_length"), Column::Numeric(vec![Some(10.0), Some(0.0)]));
        assert_eq!(frame.schema.len(), 26);
    }

    #[test]
    fn output_rows_are_a_subset_of_input_rows() {
        let t = table(&[
            row(" 36 months", "Jan-2015", "Fully Paid", "Jan-2000", "1 year", "1", ""),
            row(" 60 months", "Jan-2015", "Fully Paid", "Jan-2000", "1 year", "1", ""),
            row(" 36 months", "Jan-2013", "Charged Off", "Jan-2001", "4 years", "0", ""),
        ]);
        let (frame, _) = lending_club_frame(&t, true).unwrap();
        assert!(frame.source_rows.iter().all(|&r| r < t.n_rows()));
        assert_eq!(frame.source_rows, vec![0, 2]);
        let (ds, params, _) = prepare_lending_club(&t).unwrap();
        assert_eq!(ds.features.cols(), params.width());
        assert_eq!(ds.rows(), 2);
    }

    #[test]
    fn emp_length_parsing() {
        assert_eq!(parse_emp_length("< 1 year"), Some(0.0));
        assert_eq!(parse_emp_length("1 year"), Some(1.0));
        assert_eq!(parse_emp_length("10+ years"), Some(10.0));
        assert_eq!(parse_emp_length("n/a"), None);
    }

    #[test]
    fn missing_columns_and_bad_dates() {
        let t = read_csv("term,issue_d\n36,Jan-2015\n".as_bytes(), "lc", &LC_DATE_COLUMNS).unwrap();
        assert!(matches!(lending_club_frame(&t, true), Err(Error::MissingColumns(_))));
        let mut s = HEADER.to_string();
        s.push('\n');
        s.push_str(&row(" 36 months", "someday", "Fully Paid", "Jan-2000", "1 year", "1", ""));
        assert!(read_csv(s.as_bytes(), "lc", &LC_DATE_COLUMNS).is_err());
    }
}
