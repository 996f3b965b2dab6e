use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag, config key or config value.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),
    #[error("archive {}: format version {found} is not supported (expected {expected})", path.display())]
    ArchiveVersion { path: PathBuf, found: u64, expected: u64 },
    #[error("feature mismatch: input lacks columns required by the model: {}", .0.join(", "))]
    FeatureMismatch(Vec<String>),
    #[error("archive {}: {message}", path.display())]
    Archive { path: PathBuf, message: String },
    #[error("{path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] bsac::Error),
}

impl CliError {
    /// Process exit code: 2 for usage, configuration and input-data
    /// problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        use bsac::Error as E;
        match self {
            CliError::Config(_)
            | CliError::MissingInput(_)
            | CliError::ArchiveVersion { .. }
            | CliError::FeatureMismatch(_)
            | CliError::Archive { .. } => 2,
            CliError::Core(
                E::MissingColumns(_)
                | E::Csv { .. }
                | E::Parse { .. }
                | E::InvalidLabel { .. }
                | E::SingleClass
                | E::MajorityNotNegative { .. }
                | E::ClassTooSmall { .. },
            ) => 2,
            CliError::Io { .. } | CliError::Core(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
