//! Continuous adaptive re-identification of a single tracked person.
//!
//! The crate consumes per-frame detections (an MOT track ID plus an appearance
//! embedding), keeps a running per-dimension model of the tracked person's
//! appearance, and gates re-identification with an adaptive threshold learned
//! from the target's own distances. Both models are refreshed with a damped
//! exponential moving average whose window stretches or shrinks with the
//! current distance.
//!
//! Modules:
//! - [`feature`]: embeddings, detections and the σ-scaled distance
//! - [`dema`]: the damped moving average and its damping factors
//! - [`model`]: target appearance model and threshold model
//! - [`engine`]: the per-frame state machine with the distractor blacklist
//! - [`sim`]: seeded synthetic scenarios with ground truth
//!
//! `no_std` with `alloc`. Enable the `serde` feature for serialization.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dema;
pub mod engine;
mod error;
pub mod feature;
pub mod model;
pub mod sim;

pub use dema::{alpha_damp, delta_f, delta_lambda, DeltaLambda, DemaState};
pub use engine::{DampingMode, Decision, DecisionKind, EngineConfig, ReidEngine};
pub use error::{Error, Result};
pub use feature::{
    elementwise_squared_deviation, scalar_squared_deviation, statistical_distance, Detection, FeatureVector,
};
pub use model::{TargetModel, ThresholdModel};
pub use sim::{generate, Scenario, ScenarioConfig};
