//! Pipeline orchestration: configuration, stage execution, synthetic
//! fixtures, and run manifests.

pub mod config;
pub mod manifest;
pub mod stages;
pub mod synth;

pub use config::{CliOverrides, DataPaths, PipelineConfig, SeConfig, TvpConfig};
pub use manifest::{sha256_bytes, sha256_file, RunManifest};
pub use stages::{
    run_ccf, run_ingest, run_reg, run_report, run_tvp, RegModel, ReportOutcome, StageOutcome,
};
pub use synth::{daily_calendar, generate_fixture_set, weekday_calendar, SynthConfig};
