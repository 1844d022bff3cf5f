//! Damped versus plain-EMA threshold behaviour.

use std::io::Write;

use carpe_core::dema::DEFAULT_N_MAX;
use carpe_core::sim::Scenario;
use carpe_core::{delta_lambda, DampingMode, DecisionKind, EngineConfig, ReidEngine, ThresholdModel};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::run::InitialBinding;

/// Threshold state after one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub frame_index: u64,
    pub kind: Option<DecisionKind>,
    pub distance: Option<f64>,
    pub mu_d: f64,
    pub sigma_d: f64,
    pub lambda_d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedTrace {
    pub damped: Vec<TracePoint>,
    pub undamped: Vec<TracePoint>,
}

impl PairedTrace {
    pub fn max_lambda(trace: &[TracePoint]) -> f64 {
        trace.iter().map(|p| p.lambda_d).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "frame_index,damped_kind,damped_distance,damped_mu_d,damped_sigma_d,damped_lambda_d,\
             ema_kind,ema_distance,ema_mu_d,ema_sigma_d,ema_lambda_d"
        )?;
        for (a, b) in self.damped.iter().zip(&self.undamped) {
            writeln!(out, "{},{},{}", a.frame_index, cells(a), cells(b))?;
        }
        out.flush()
    }

    /// One object per frame: `{"frame_index":..,"damped":{..},"ema":{..}}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            frame_index: u64,
            damped: &'a TracePoint,
            ema: &'a TracePoint,
        }
        for (a, b) in self.damped.iter().zip(&self.undamped) {
            serde_json::to_writer(&mut out, &Row { frame_index: a.frame_index, damped: a, ema: b })?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

fn cells(p: &TracePoint) -> String {
    format!(
        "{},{},{},{},{}",
        p.kind.map(DecisionKind::as_str).unwrap_or(""),
        p.distance.map(|d| d.to_string()).unwrap_or_default(),
        p.mu_d,
        p.sigma_d,
        p.lambda_d
    )
}

fn engine_trace(
    scenario: &Scenario,
    config: &EngineConfig,
    binding: InitialBinding,
) -> Result<Vec<TracePoint>> {
    let first = scenario
        .frames
        .first()
        .and_then(|dets| dets.iter().find(|d| d.track_id == binding.track_id))
        .ok_or_else(|| {
            HarnessError::Validation(format!("track {} not present on frame 0", binding.track_id))
        })?;
    let mut engine = ReidEngine::new(config.clone(), binding.track_id, &first.feature)?;
    let mut trace = Vec::with_capacity(scenario.num_frames());
    for (f, dets) in scenario.frames.iter().enumerate() {
        let dec = engine.process_frame(f as u64, dets)?;
        let th = engine.threshold();
        trace.push(TracePoint {
            frame_index: dec.frame_index,
            kind: Some(dec.kind),
            distance: dec.distance,
            mu_d: th.mu_d(),
            sigma_d: th.sigma_d(),
            lambda_d: th.lambda_d(),
        });
    }
    Ok(trace)
}

/// Runs the same stream through a damped engine and one with both damping
/// factors pinned to 1; every other setting is taken from `config`.
pub fn compare_damping(
    scenario: &Scenario,
    config: &EngineConfig,
    binding: InitialBinding,
) -> Result<PairedTrace> {
    let with = |damping| EngineConfig { damping, ..config.clone() };
    Ok(PairedTrace {
        damped: engine_trace(scenario, &with(DampingMode::Damped), binding)?,
        undamped: engine_trace(scenario, &with(DampingMode::Undamped), binding)?,
    })
}

/// Feeds a raw distance sequence into a threshold model, with the damping
/// factor chosen by `delta(d, lambda_before)`.
pub fn threshold_trace_with<F>(
    distances: &[f64],
    lambda_init: f64,
    n_max: u32,
    mut delta: F,
) -> Result<Vec<TracePoint>>
where
    F: FnMut(f64, f64) -> f64,
{
    let mut th = ThresholdModel::new(lambda_init, n_max)?;
    let mut trace = Vec::with_capacity(distances.len());
    for (i, &d) in distances.iter().enumerate() {
        let dl = delta(d, th.lambda_d());
        th.update(d, dl)?;
        trace.push(TracePoint {
            frame_index: i as u64,
            kind: None,
            distance: Some(d),
            mu_d: th.mu_d(),
            sigma_d: th.sigma_d(),
            lambda_d: th.lambda_d(),
        });
    }
    Ok(trace)
}

pub fn threshold_trace(distances: &[f64], lambda_init: f64, mode: DampingMode) -> Result<Vec<TracePoint>> {
    match mode {
        DampingMode::Damped => {
            threshold_trace_with(distances, lambda_init, DEFAULT_N_MAX, |d, l| delta_lambda(d, l).value)
        }
        DampingMode::Undamped => threshold_trace_with(distances, lambda_init, DEFAULT_N_MAX, |_, _| 1.0),
    }
}

pub fn compare_threshold_damping(distances: &[f64], lambda_init: f64) -> Result<PairedTrace> {
    Ok(PairedTrace {
        damped: threshold_trace(distances, lambda_init, DampingMode::Damped)?,
        undamped: threshold_trace(distances, lambda_init, DampingMode::Undamped)?,
    })
}
