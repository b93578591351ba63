use std::path::PathBuf;

use thiserror::Error;

use crate::instance::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("schedule is infeasible: {}", join_violations(.0))]
    InfeasibleInput(Vec<Violation>),

    #[error("sequencing decision has a precedence cycle")]
    CyclicPrecedence,

    #[error("malformed sequencing: {0}")]
    InvalidSequencing(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("value {value} of characteristic `{characteristic}` is not in the budget grid")]
    UnknownCharacteristicValue { characteristic: &'static str, value: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("class {label} has {count} rows, at least {required} required")]
    ClassTooSmall {
        label: String,
        count: usize,
        required: usize,
    },

    #[error("dataset needs at least two distinct labels")]
    SingleClass,

    #[error("non-finite feature value in row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },

    #[error("expected {expected} features, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file {}: {message}", .path.display())]
    Format { path: PathBuf, message: String },

    #[error("io error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    let shown: Vec<String> = v.iter().take(5).map(|x| x.to_string()).collect();
    let mut s = shown.join("; ");
    if v.len() > 5 {
        s.push_str(&format!("; ... ({} more)", v.len() - 5));
    }
    s
}
