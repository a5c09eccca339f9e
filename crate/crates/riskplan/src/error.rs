use std::path::PathBuf;

/// Process exit codes of the CLI.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const PLANNING: i32 = 3;
    pub const FIT: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    /// Every problem found in one pass, each prefixed with its field path.
    #[error("invalid input:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("{stage}: {source}")]
    Planning {
        stage: &'static str,
        #[source]
        source: riskplan_core::Error,
    },

    #[error("power model fit failed: {0}")]
    Fit(String),

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Validation(_) | Error::Csv { .. } | Error::Json { .. } => {
                exit::VALIDATION
            }
            Error::Planning { source, .. } => match source {
                riskplan_core::Error::Fit(_) => exit::FIT,
                riskplan_core::Error::Config(_) | riskplan_core::Error::Input(_) => exit::VALIDATION,
                _ => exit::PLANNING,
            },
            Error::Fit(_) => exit::FIT,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(riskplan_core::Error) -> Self {
        move |source| Error::Planning { stage, source }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        let path = path.into();
        if source.is_syntax() || source.is_data() || source.is_eof() {
            Error::Parse { path, line: source.line(), column: source.column(), message: source.to_string() }
        } else {
            Error::Json { path, source }
        }
    }
}
