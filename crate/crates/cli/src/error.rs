use thiserror::Error;

/// Exit status for validation failures (bad config, failed cross-check).
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for numerical non-convergence.
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: key `{key}`: {message}")]
    Config {
        key: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Library(#[from] qfikit::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(qfikit::Error::NonConvergence { .. }) => EXIT_NON_CONVERGENCE,
            CliError::Io(_) => 1,
            _ => EXIT_VALIDATION,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
