//! Reproducible Monte Carlo verification of the limit theorems.
//!
//! Experiments are described by an [`ExperimentConfig`] (a JSON document),
//! executed by [`run_experiment`], and scored into an [`ExperimentReport`]
//! whose CSV/JSON renderings are byte-identical for a fixed config and seed,
//! independent of the worker thread count.

mod chunk;
mod config;
mod report;
mod runners;

pub use chunk::{chunk_seed, derive_seed, map_chunks, CHUNK_SAMPLES};
pub use config::{ExperimentConfig, ExperimentKind, KRule, MixingFamily, MuRule};
pub use report::{ExperimentReport, ReportCell, Verdict};
pub use runners::{run_experiment, KS_TOL, PROJ_RTOL, TAIL_RTOL, VARIANCE_RTOL};
