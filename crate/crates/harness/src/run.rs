//! Driving engines over scenarios.

use std::io::Write;

use carpe_core::sim::Scenario;
use carpe_core::{Decision, EngineConfig, ReidEngine};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::metrics::{compute_metrics, RunMetrics};

/// The person the engine follows and the track ID it starts bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialBinding {
    pub person_id: usize,
    pub track_id: u64,
}

impl InitialBinding {
    /// Binding to `person` under the track it carries on the first frame.
    pub fn at_start(scenario: &Scenario, person: usize) -> Result<Self> {
        let track_id = scenario
            .ground_truth
            .track_id(0, person)
            .ok_or_else(|| HarnessError::Validation(format!("person {person} is not visible on frame 0")))?;
        Ok(Self { person_id: person, track_id })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub decisions: Vec<Decision>,
    pub metrics: RunMetrics,
}

/// Seeds an engine from the bound detection on frame 0, then feeds it every
/// frame in order, frame 0 included.
pub fn run(scenario: &Scenario, config: &EngineConfig, binding: InitialBinding) -> Result<RunOutcome> {
    if config.feature_dim != scenario.config.feature_dim {
        return Err(HarnessError::Validation(format!(
            "engine feature_dim {} does not match stream feature_dim {}",
            config.feature_dim, scenario.config.feature_dim
        )));
    }
    let first = scenario
        .frames
        .first()
        .and_then(|dets| dets.iter().find(|d| d.track_id == binding.track_id))
        .ok_or_else(|| {
            HarnessError::Validation(format!("track {} not present on frame 0", binding.track_id))
        })?;
    if first.person_id != Some(binding.person_id as u64) {
        return Err(HarnessError::Validation(format!(
            "track {} on frame 0 belongs to person {:?}, not {}",
            binding.track_id, first.person_id, binding.person_id
        )));
    }

    let mut engine = ReidEngine::new(config.clone(), binding.track_id, &first.feature)?;
    let mut decisions = Vec::with_capacity(scenario.num_frames());
    for (f, dets) in scenario.frames.iter().enumerate() {
        decisions.push(engine.process_frame(f as u64, dets)?);
    }
    let metrics = compute_metrics(
        scenario,
        &decisions,
        binding.person_id,
        binding.track_id,
        engine.lambda_fallbacks(),
    )?;
    Ok(RunOutcome { decisions, metrics })
}

/// One run per person visible on frame 0, in person order. Persons absent on
/// the first frame have no binding and are skipped.
pub fn sweep(scenario: &Scenario, config: &EngineConfig) -> Result<Vec<RunOutcome>> {
    let bindings: Vec<InitialBinding> =
        (0..scenario.config.num_persons).filter_map(|p| InitialBinding::at_start(scenario, p).ok()).collect();
    if bindings.is_empty() {
        return Err(HarnessError::Validation("no person is visible on frame 0".into()));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = bindings.iter().map(|&b| s.spawn(move || run(scenario, config, b))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

pub const DECISION_CSV_HEADER: &str = "frame_index,kind,track_id,distance,lambda_snapshot,blacklist_size";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_decisions<W: Write>(
    decisions: &[Decision],
    format: OutputFormat,
    mut out: W,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{DECISION_CSV_HEADER}")?;
            for d in decisions {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    d.frame_index,
                    d.kind.as_str(),
                    opt(d.track_id),
                    opt(d.distance),
                    d.lambda_snapshot,
                    d.blacklist_size
                )?;
            }
        }
        OutputFormat::Jsonl => {
            for d in decisions {
                serde_json::to_writer(&mut out, d)?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()
}
