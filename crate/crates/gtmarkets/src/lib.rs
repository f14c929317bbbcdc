//! Search-attention and market-return econometrics.
//!
//! This crate reproduces a full analysis chain linking relative
//! search-volume indices to stock-index returns across six countries:
//!
//! 1. ingest prices, search indices, case counts, and implied volatility
//!    onto one trading calendar ([`timeseries`], [`csv_io`], [`gtrends`]);
//! 2. rescale and transform the raw inputs ([`transforms`]);
//! 3. scan cross-country lead-lag structure against a reference country
//!    ([`leadlag`]);
//! 4. fit constant-parameter AR(1)-X regressions with robust standard
//!    errors ([`regress`], [`tables`]);
//! 5. estimate a time-varying coefficient path by Kalman smoothing with
//!    maximum-likelihood hyperparameters ([`tvp`]);
//! 6. orchestrate everything into deterministic, digest-manifested
//!    artifacts ([`pipeline`]).
//!
//! The `examples/` directory walks through each capability; the `gtmarkets`
//! binary exposes the same pipeline as `ingest | ccf | reg | tvp | report`
//! subcommands.

pub mod csv_io;
pub mod error;
pub mod gtrends;
pub mod leadlag;
pub mod optim;
pub mod pipeline;
pub mod regress;
pub mod tables;
pub mod timeseries;
pub mod transforms;
pub mod tvp;

pub use error::{Error, Result};
pub use timeseries::{Country, Panel, SeriesKey, SeriesKind, Source, TimeSeries};
