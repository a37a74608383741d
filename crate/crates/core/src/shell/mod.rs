//! Experiment plumbing: configuration, ingestion, emission and the runner
//! behind the command-line tool.

use std::path::PathBuf;

pub mod config;
pub mod emit;
pub mod experiment;
pub mod ingest;

pub use config::{ExperimentConfig, InputFormat, Source};
pub use emit::{Report, REPORT_SCHEMA, SCHEMA_VERSION};
pub use experiment::run_experiment;
pub use ingest::{arrange, ingest, EigenvalueRecord, IngestError, IngestErrorKind, IngestedData};

/// Version string written into every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum ShellError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid configuration, field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON output: {0}")]
    Json(#[from] serde_json::Error),
}
