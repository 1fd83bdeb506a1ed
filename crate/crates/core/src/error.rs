use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate date {date} at line {line}")]
    DuplicateDate { date: String, line: u64 },

    #[error("gap run of length {length} in column {column} starting at row {start}")]
    GapRun {
        column: String,
        start: usize,
        length: usize,
    },

    #[error("gap budget exceeded in column {column}: {fraction:.4} > {limit:.4}")]
    GapBudget {
        column: String,
        fraction: f64,
        limit: f64,
    },

    #[error("split error: {0}")]
    Split(String),

    #[error("statistics error: {0}")]
    Stat(String),

    #[error("feature error: {0}")]
    Feature(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("predict error: expected {expected} features, got {got}")]
    Predict { expected: usize, got: usize },

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Divergence { epoch: usize },

    #[error("metric error: {0}")]
    Metric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal signal that an iterative solver stopped on its iteration budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceWarning {
    pub iterations: usize,
    /// Last measured optimality gap (solver specific).
    pub residual: f64,
}

impl std::fmt::Display for ConvergenceWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "did not converge after {} iterations (residual {:.3e})",
            self.iterations, self.residual
        )
    }
}
