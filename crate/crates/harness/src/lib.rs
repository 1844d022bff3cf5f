//! Evaluation harness for the `carpe-core` re-identification engine.
//!
//! * [`stream`]: line-delimited JSON detection streams
//! * [`config`]: TOML engine and scenario configs
//! * [`run`]: driving engines, per-person sweeps, decision output
//! * [`metrics`]: scoring a run against ground truth
//! * [`damping`]: damped versus plain-EMA threshold traces
//! * [`report`]: CSV, summary and SVG plots across runs

pub mod config;
pub mod damping;
mod error;
pub mod metrics;
pub mod report;
pub mod run;
pub mod stream;

pub use error::{HarnessError, Result};
pub use metrics::{compute_metrics, RunMetrics};
pub use report::{emit_report, Report};
pub use run::{run, sweep, InitialBinding, OutputFormat, RunOutcome};
pub use stream::{read_stream, write_stream};
