//! Per-run evaluation against simulator ground truth.
//!
//! * A tracking length is a maximal run of consecutive frames in which the
//!   target is visible under one MOT track ID. Runs cut by the end of the
//!   stream are included.
//! * `mot_error_count` counts changes of the target's track ID between
//!   consecutive appearances, gaps included.
//! * A re-entry is a frame where the target is visible after being absent
//!   on the previous frame. Its delay runs from that frame to the first
//!   decision naming the target's track, inclusive, searched until the next
//!   re-entry. Re-entries never recovered are counted separately.
//! * `misid_count` counts episodes of binding to another person: a
//!   Reidentified decision onto a non-target, or a wrong DirectTrack that
//!   follows a decision that was not already wrong. `misid_frames` counts
//!   every wrongly bound frame.

use carpe_core::sim::Scenario;
use carpe_core::{Decision, DecisionKind};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub target_person: usize,
    pub initial_track_id: u64,
    pub frames: u64,
    pub fps: f64,
    pub mot_tracking_lengths: Vec<f64>,
    pub reid_delays: Vec<f64>,
    pub unrecovered_reentries: u64,
    pub mot_error_count: u64,
    pub reid_count: u64,
    pub misid_count: u64,
    pub misid_frames: u64,
    pub direct_frames: u64,
    pub reidentified_frames: u64,
    pub lost_frames: u64,
    pub lambda_fallbacks: u64,
}

impl RunMetrics {
    pub fn mean_tracking_length(&self) -> Option<f64> {
        mean(&self.mot_tracking_lengths)
    }

    pub fn mean_reid_delay(&self) -> Option<f64> {
        mean(&self.reid_delays)
    }
}

pub(crate) fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Scores one run's `decisions` (one per frame, in order) for `target`.
pub fn compute_metrics(
    scenario: &Scenario,
    decisions: &[Decision],
    target: usize,
    initial_track_id: u64,
    lambda_fallbacks: u64,
) -> Result<RunMetrics> {
    let n = scenario.num_frames();
    if decisions.len() != n {
        return Err(HarnessError::Validation(format!(
            "{} decisions for a {n}-frame stream",
            decisions.len()
        )));
    }
    if target >= scenario.config.num_persons {
        return Err(HarnessError::Validation(format!(
            "target person {target} out of range for {} persons",
            scenario.config.num_persons
        )));
    }
    let gt = &scenario.ground_truth;
    let fps = scenario.config.fps;
    let secs = |frames: usize| frames as f64 / fps;

    let mut lengths = Vec::new();
    let mut run: Option<(u64, usize)> = None;
    let mut last_seen: Option<u64> = None;
    let mut mot_errors = 0u64;
    for f in 0..n {
        let id = gt.track_id(f, target);
        match (run, id) {
            (Some((rid, len)), Some(t)) if rid == t => run = Some((rid, len + 1)),
            (_, id) => {
                if let Some((_, len)) = run.take() {
                    lengths.push(secs(len));
                }
                run = id.map(|t| (t, 1));
            }
        }
        if let Some(t) = id {
            if last_seen.is_some_and(|prev| prev != t) {
                mot_errors += 1;
            }
            last_seen = Some(t);
        }
    }
    if let Some((_, len)) = run {
        lengths.push(secs(len));
    }

    let names_target = |f: usize, d: &Decision| d.track_id.is_some() && d.track_id == gt.track_id(f, target);

    let reentries: Vec<usize> =
        (1..n).filter(|&f| gt.is_visible(f, target) && !gt.is_visible(f - 1, target)).collect();
    let mut delays = Vec::new();
    let mut unrecovered = 0u64;
    for (i, &start) in reentries.iter().enumerate() {
        let end = reentries.get(i + 1).copied().unwrap_or(n);
        match (start..end).find(|&g| names_target(g, &decisions[g])) {
            Some(g) => delays.push(secs(g - start + 1)),
            None => unrecovered += 1,
        }
    }

    let mut m = RunMetrics {
        target_person: target,
        initial_track_id,
        frames: n as u64,
        fps,
        mot_tracking_lengths: lengths,
        reid_delays: delays,
        unrecovered_reentries: unrecovered,
        mot_error_count: mot_errors,
        reid_count: 0,
        misid_count: 0,
        misid_frames: 0,
        direct_frames: 0,
        reidentified_frames: 0,
        lost_frames: 0,
        lambda_fallbacks,
    };
    let mut prev_wrong = false;
    for (f, d) in decisions.iter().enumerate() {
        if d.frame_index != f as u64 {
            return Err(HarnessError::Validation(format!(
                "decision {f} carries frame_index {}",
                d.frame_index
            )));
        }
        match d.kind {
            DecisionKind::DirectTrack => m.direct_frames += 1,
            DecisionKind::Reidentified => m.reidentified_frames += 1,
            DecisionKind::Lost => m.lost_frames += 1,
        }
        let wrong = d.track_id.is_some() && !names_target(f, d);
        if wrong {
            m.misid_frames += 1;
            if d.kind == DecisionKind::Reidentified || !prev_wrong {
                m.misid_count += 1;
            }
        } else if d.kind == DecisionKind::Reidentified {
            m.reid_count += 1;
        }
        prev_wrong = wrong;
    }
    Ok(m)
}
