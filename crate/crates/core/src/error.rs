use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The cardinality thresholds cannot be met by any partition.
    #[error("infeasible grade cardinality thresholds: {0}")]
    InfeasibleThresholds(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("not a staircase: {}", join_issues(.0))]
    NotStaircase(Vec<crate::solvers::StructuralIssue>),

    #[error("state has {actual} bits but the model has {expected} variables")]
    StateLength { expected: usize, actual: usize },

    #[error("exact search over {variables} variables ({states} states) exceeds the cap of {cap} variables")]
    TooLarge {
        variables: usize,
        states: String,
        cap: usize,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn join_issues(issues: &[crate::solvers::StructuralIssue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
