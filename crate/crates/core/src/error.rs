use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("backward called without a cached forward pass")]
    NoForwardCache,

    #[error("label at index {index} is {value}, expected 0 or 1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("labels contain a single class")]
    SingleClass,

    #[error("majority class must be negative: {positives} positives vs {negatives} negatives")]
    MajorityNotNegative { positives: usize, negatives: usize },

    #[error("class {class} has {count} members, fewer than k = {k}")]
    ClassTooSmall { class: u8, count: usize, k: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing columns: {}", .0.join(", "))]
    MissingColumns(Vec<String>),

    #[error("{path}: line {line}: {message}")]
    Csv {
        path: String,
        line: u64,
        message: String,
    },

    #[error("parse error in column {column}, row {row}: {message}")]
    Parse {
        column: String,
        row: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::Shape {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
