use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain an operation accepts.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// Vector lengths or grid shapes disagree.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    Dimension {
        expected: usize,
        got: usize,
        context: String,
    },

    /// All rule firing strengths are zero, so normalization is undefined.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("grid partition would create {rules} rules, above the cap of {cap}; reduce the number of membership functions per input")]
    RuleExplosion { rules: usize, cap: usize },

    /// A metric is mathematically undefined for the given data.
    #[error("{metric} is undefined: {reason}")]
    Undefined {
        metric: &'static str,
        reason: String,
    },

    #[error("query times outside the knot span [{lo}, {hi}]: {offending:?}")]
    OutOfRange {
        lo: f64,
        hi: f64,
        offending: Vec<f64>,
    },

    #[error("unknown attribute column `{0}`")]
    UnknownAttribute(String),

    /// A dataset's columns differ from the ones a model was trained on.
    #[error("dataset attributes {got:?} do not match model attributes {expected:?}")]
    AttributeMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dim(expected: usize, got: usize, context: impl Into<String>) -> Self {
        Error::Dimension {
            expected,
            got,
            context: context.into(),
        }
    }
}
