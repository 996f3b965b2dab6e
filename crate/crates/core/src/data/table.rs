use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar month, as used by `issue_d`-style columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    /// 1..=12
    pub month: u32,
}

const MONTHS: [&str; 12] = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"];

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month {month}");
        YearMonth { year, month }
    }

    /// Months since year 0, for whole-month differences.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    /// Whole months from `earlier` to `self`.
    pub fn months_since(self, earlier: YearMonth) -> i64 {
        self.ordinal() - earlier.ordinal()
    }

    /// Accepts `Mon-YYYY` (e.g. `Dec-2015`), `YYYY-MM` and `YYYY-MM-DD`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((mon, year)) = s.split_once('-') {
            let lower = mon.to_ascii_lowercase();
            if let Some(m) = MONTHS.iter().position(|&name| name == lower) {
                let year: i32 = year.trim().parse().ok()?;
                return Some(YearMonth::new(year, m as u32 + 1));
            }
        }
        let mut parts = s.split('-');
        let year: i32 = parts.next()?.parse().ok()?;
        let month: u32 = parts.next()?.parse().ok()?;
        if let Some(day) = parts.next() {
            let day: u32 = day.parse().ok()?;
            if !(1..=31).contains(&day) {
                return None;
            }
        }
        if parts.next().is_some() || !(1..=12).contains(&month) {
            return None;
        }
        Some(YearMonth::new(year, month))
    }
}

impl std::fmt::Display for YearMonth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// A typed column; `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
    Date(Vec<Option<YearMonth>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
            Column::Date(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Column::Numeric(v) => v[row].is_none(),
            Column::Categorical(v) => v[row].is_none(),
            Column::Date(v) => v[row].is_none(),
        }
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_missing(r)).count()
    }

    pub fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&r| v[r].clone()).collect()),
            Column::Date(v) => Column::Date(rows.iter().map(|&r| v[r]).collect()),
        }
    }

    /// Cell rendered as a category label. Integral numbers print without a
    /// fractional part, so a numeric code `2` becomes `"2"`.
    pub fn category(&self, row: usize) -> Option<String> {
        match self {
            Column::Numeric(v) => v[row].map(format_code),
            Column::Categorical(v) => v[row].clone(),
            Column::Date(v) => v[row].map(|d| d.to_string()),
        }
    }

    /// Cell as a number. Text cells are parsed after trimming a trailing `%`.
    pub fn number(&self, row: usize) -> std::result::Result<Option<f64>, String> {
        match self {
            Column::Numeric(v) => Ok(v[row]),
            Column::Categorical(v) => match &v[row] {
                None => Ok(None),
                Some(s) => {
                    let t = s.trim().trim_end_matches('%').trim();
                    t.parse::<f64>().map(Some).map_err(|_| format!("not a number: {s:?}"))
                }
            },
            Column::Date(_) => Err("date column used as a number".into()),
        }
    }
}

pub(crate) fn format_code(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTable {
    names: Vec<String>,
    columns: Vec<Column>,
}

impl RawTable {
    pub fn new(names: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::shape("RawTable::new", names.len(), columns.len()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate column name {n:?}")));
            }
        }
        if let Some(first) = columns.first() {
            if let Some(c) = columns.iter().position(|c| c.len() != first.len()) {
                return Err(Error::shape("RawTable::new", first.len(), format!("{} rows in {}", columns[c].len(), names[c])));
            }
        }
        Ok(RawTable { names, columns })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.index_of(name).map(|i| &self.columns[i])
    }

    pub fn require(&self, name: &str) -> Result<&Column> {
        self.column(name).ok_or_else(|| Error::MissingColumns(vec![name.to_string()]))
    }

    /// Errors listing every name in `names` that is absent.
    pub fn require_all(&self, names: &[&str]) -> Result<()> {
        let missing: Vec<String> = names
            .iter()
            .filter(|n| self.index_of(n).is_none())
            .map(|n| n.to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingColumns(missing))
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> RawTable {
        RawTable {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
        }
    }

    pub fn push_column(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if self.index_of(&name).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate column name {name:?}")));
        }
        if !self.columns.is_empty() && column.len() != self.n_rows() {
            return Err(Error::shape("push_column", self.n_rows(), column.len()));
        }
        self.names.push(name);
        self.columns.push(column);
        Ok(())
    }

    pub fn missing_fraction(&self, name: &str) -> Option<f64> {
        let c = self.column(name)?;
        if c.is_empty() {
            return Some(0.0);
        }
        Some(c.missing_count() as f64 / c.len() as f64)
    }
}

/// Reads a comma-separated file with a header row. Columns whose non-empty
/// cells all parse as numbers become numeric; columns named in
/// `date_columns` become dates; everything else is categorical. Empty cells
/// are missing.
pub fn load_csv(path: impl AsRef<Path>, date_columns: &[&str]) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, &path.display().to_string(), date_columns)
}

/// [`load_csv`] over any reader; `source` names the input in errors.
pub fn read_csv<R: Read>(reader: R, source: &str, date_columns: &[&str]) -> Result<RawTable> {
    let csv_err = |line: u64, message: String| Error::Csv {
        path: source.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(1, e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(csv_err(1, format!("duplicate header {h:?}")));
        }
    }

    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(csv_err(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (col, field) in cells.iter_mut().zip(record.iter()) {
            let f = field.trim();
            col.push(if f.is_empty() { None } else { Some(f.to_string()) });
        }
    }

    let mut columns = Vec::with_capacity(headers.len());
    for (name, raw) in headers.iter().zip(cells) {
        columns.push(type_column(name, raw, date_columns.contains(&name.as_str()))?);
    }
    RawTable::new(headers, columns)
}

fn type_column(name: &str, raw: Vec<Option<String>>, is_date: bool) -> Result<Column> {
    if is_date {
        let mut out = Vec::with_capacity(raw.len());
        for (row, cell) in raw.iter().enumerate() {
            out.push(match cell {
                None => None,
                Some(s) => Some(YearMonth::parse(s).ok_or_else(|| Error::Parse {
                    column: name.to_string(),
                    row,
                    message: format!("unparseable date {s:?}"),
                })?),
            });
        }
        return Ok(Column::Date(out));
    }
    let parsed: Option<Vec<Option<f64>>> = raw
        .iter()
        .map(|cell| match cell {
            None => Some(None),
            Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some),
        })
        .collect();
    Ok(match parsed {
        Some(values) if values.iter().any(Option::is_some) => Column::Numeric(values),
        _ => Column::Categorical(raw),
    })
}

/// Removes columns whose missing fraction is strictly above `threshold`.
/// Returns the reduced table and the dropped names.
pub fn drop_high_missing(table: &RawTable, threshold: f64) -> Result<(RawTable, Vec<String>)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!("threshold must be in (0, 1], got {threshold}")));
    }
    let n = table.n_rows();
    let mut names = Vec::new();
    let mut columns = Vec::new();
    let mut dropped = Vec::new();
    for (name, col) in table.names.iter().zip(&table.columns) {
        let frac = if n == 0 { 0.0 } else { col.missing_count() as f64 / n as f64 };
        if frac > threshold {
            dropped.push(name.clone());
        } else {
            names.push(name.clone());
            columns.push(col.clone());
        }
    }
    Ok((RawTable { names, columns }, dropped))
}
