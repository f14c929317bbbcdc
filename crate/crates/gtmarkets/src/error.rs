//! Crate-wide error type.

use chrono::NaiveDate;
use thiserror::Error;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violated a mathematical precondition (non-positive price,
    /// out-of-range rescale input, zero-variance PCA input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Too few observations for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A calendar date expected in a series was not found.
    #[error("missing observation for {date}: {context}")]
    MissingObservation { date: NaiveDate, context: String },

    /// The design matrix is rank deficient.
    #[error("singular design: column {column:?} is linearly dependent")]
    SingularDesign { column: String },

    /// A cross-correlation window had zero variance.
    #[error("undefined correlation at lag {lag}: constant overlap window")]
    UndefinedCorrelation { lag: i64 },

    /// Malformed payload. `offset` is a byte position when one is known.
    #[error("parse error{}: {message}", offset.map(|o| format!(" at byte {o}")).unwrap_or_default())]
    Parse { offset: Option<usize>, message: String },

    /// Structurally valid input with out-of-contract values.
    #[error("validation error: {0}")]
    Validation(String),

    /// Offline fetch found nothing under the canonical cache key.
    #[error("cache miss for key {key}")]
    CacheMiss { key: String },

    /// HTTP request failed after all retries.
    #[error("transport error after {retries} attempt(s): {message}")]
    Transport { retries: u32, message: String },

    /// The Kalman filter hit a non-positive innovation variance.
    #[error("filter instability at step {step}: innovation variance {value:e} at or below floor")]
    Instability { step: usize, value: f64 },

    /// Every optimizer start diverged or failed to produce a finite optimum.
    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    /// An argument violated the call contract.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Pipeline configuration problem.
    #[error("config error: {0}")]
    Config(String),

    /// CSV input violated the documented schema.
    #[error("schema error in {file} line {line}: {message}")]
    Schema {
        file: String,
        line: u64,
        message: String,
    },

    /// Overlapping duplicate rows in tabular input.
    #[error("duplicate row: {0}")]
    Duplicate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
