//! The per-frame re-identification state machine.
//!
//! Each frame runs two phases:
//!
//! 1. **Association.** If the MOT still reports the bound track ID, that
//!    detection is taken as the target (direct track). Otherwise every
//!    non-blacklisted detection is scored against the target model and the
//!    closest one is accepted if its distance is strictly below the gate.
//! 2. **Update.** When a detection was chosen, its feature refreshes the
//!    target model and its distance refreshes the gate statistics.
//!
//! A frame with no accepted detection is a no-op on every model and on the
//! blacklist.

use alloc::borrow::Cow;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dema::{delta_f, delta_lambda, DeltaLambda, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::feature::{check_dim, Detection, FeatureVector, DEFAULT_EPS_SIGMA};
use crate::model::{TargetModel, ThresholdModel};

/// Whether the damping factors are computed from the distances or pinned to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum DampingMode {
    #[default]
    Damped,
    /// Plain EMA: both damping factors fixed at 1.
    Undamped,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct EngineConfig {
    pub feature_dim: usize,
    /// Floor on σ components in distance denominators.
    pub eps_sigma: f64,
    /// Cap on both DEMA update counters.
    pub n_max: u32,
    /// Consecutive direct-track frames before co-visible IDs are blacklisted.
    pub blacklist_stable_frames: u32,
    /// Gate used before the threshold model has seen a distance.
    pub lambda_init: f64,
    /// L2-normalize every incoming feature.
    pub normalize_features: bool,
    pub blacklist_enabled: bool,
    pub damping: DampingMode,
    /// Number of target-model updates required before distances start
    /// feeding the threshold model. Values 0 and 1 feed it from the first
    /// frame.
    pub threshold_warmup: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            feature_dim: 256,
            eps_sigma: DEFAULT_EPS_SIGMA,
            n_max: DEFAULT_N_MAX,
            blacklist_stable_frames: 30,
            lambda_init: 1.0,
            normalize_features: false,
            blacklist_enabled: true,
            damping: DampingMode::Damped,
            threshold_warmup: 10,
        }
    }
}

impl EngineConfig {
    pub fn with_dim(feature_dim: usize) -> Self {
        Self { feature_dim, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = Vec::new();
        if self.feature_dim == 0 {
            problems.push("feature_dim must be positive".into());
        }
        if !(self.eps_sigma > 0.0) || !self.eps_sigma.is_finite() {
            problems.push(alloc::format!("eps_sigma must be positive, got {}", self.eps_sigma));
        }
        if self.n_max == 0 {
            problems.push("n_max must be positive".into());
        }
        if self.blacklist_stable_frames == 0 {
            problems.push("blacklist_stable_frames must be positive".into());
        }
        if !(self.lambda_init > 0.0) || !self.lambda_init.is_finite() {
            problems.push(alloc::format!("lambda_init must be positive, got {}", self.lambda_init));
        }
        if self.threshold_warmup > self.n_max {
            problems.push(alloc::format!(
                "threshold_warmup ({}) cannot exceed n_max ({})",
                self.threshold_warmup,
                self.n_max
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DecisionKind {
    /// The bound track ID was present in the frame.
    DirectTrack,
    /// The bound ID was absent and another detection passed the gate.
    Reidentified,
    /// Nothing was associated this frame.
    Lost,
}

impl DecisionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionKind::DirectTrack => "DirectTrack",
            DecisionKind::Reidentified => "Reidentified",
            DecisionKind::Lost => "Lost",
        }
    }
}

/// Per-frame engine output.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decision {
    pub frame_index: u64,
    pub kind: DecisionKind,
    pub track_id: Option<u64>,
    /// Distance of the chosen detection to the pre-update target model.
    pub distance: Option<f64>,
    /// Gate in force when the frame was evaluated.
    pub lambda_snapshot: f64,
    pub blacklist_size: usize,
}

/// Single-target re-identification engine.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReidEngine {
    config: EngineConfig,
    tracked_id: u64,
    target: TargetModel,
    threshold: ThresholdModel,
    blacklist: BTreeSet<u64>,
    stable_run: u32,
    lambda_fallbacks: u64,
}

impl ReidEngine {
    /// Binds the engine to `initial_id` and seeds the target model with
    /// `initial_feature`.
    pub fn new(config: EngineConfig, initial_id: u64, initial_feature: &FeatureVector) -> Result<Self> {
        config.validate()?;
        check_dim(config.feature_dim, initial_feature.dim())?;
        let seed =
            if config.normalize_features { initial_feature.l2_normalized() } else { initial_feature.clone() };
        let target = TargetModel::bootstrap(seed.as_slice(), config.n_max)?;
        let threshold = ThresholdModel::new(config.lambda_init, config.n_max)?;
        Ok(Self {
            config,
            tracked_id: initial_id,
            target,
            threshold,
            blacklist: BTreeSet::new(),
            stable_run: 0,
            lambda_fallbacks: 0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn tracked_id(&self) -> u64 {
        self.tracked_id
    }

    pub fn target(&self) -> &TargetModel {
        &self.target
    }

    pub fn threshold(&self) -> &ThresholdModel {
        &self.threshold
    }

    pub fn blacklist(&self) -> &BTreeSet<u64> {
        &self.blacklist
    }

    pub fn stable_run(&self) -> u32 {
        self.stable_run
    }

    /// Updates where the gate was not positive and the threshold damping
    /// factor fell back to 1.
    pub fn lambda_fallbacks(&self) -> u64 {
        self.lambda_fallbacks
    }

    fn prepare<'a>(&self, f: &'a FeatureVector) -> Cow<'a, [f64]> {
        if self.config.normalize_features {
            Cow::Owned(f.l2_normalized().into_inner())
        } else {
            Cow::Borrowed(f.as_slice())
        }
    }

    fn validate_frame(&self, frame_index: u64, detections: &[Detection]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for det in detections {
            if det.frame_index != frame_index {
                return Err(Error::MixedFrames { expected: frame_index, found: det.frame_index });
            }
            check_dim(self.config.feature_dim, det.feature.dim())?;
            if !seen.insert(det.track_id) {
                return Err(Error::DuplicateTrackId { track_id: det.track_id });
            }
        }
        Ok(())
    }

    /// Runs one frame. Malformed frames are rejected before any state changes.
    pub fn process_frame(&mut self, frame_index: u64, detections: &[Detection]) -> Result<Decision> {
        self.validate_frame(frame_index, detections)?;
        let lambda_snapshot = self.threshold.lambda_d();

        if let Some(det) = detections.iter().find(|d| d.track_id == self.tracked_id) {
            let x = self.prepare(&det.feature).into_owned();
            let d = self.target.distance(&x, self.config.eps_sigma)?;
            self.update_models(&x, d)?;
            self.stable_run = self.stable_run.saturating_add(1);
            if self.config.blacklist_enabled && self.stable_run >= self.config.blacklist_stable_frames {
                let tracked = self.tracked_id;
                self.blacklist.extend(detections.iter().map(|d| d.track_id).filter(|&id| id != tracked));
            }
            return Ok(Decision {
                frame_index,
                kind: DecisionKind::DirectTrack,
                track_id: Some(self.tracked_id),
                distance: Some(d),
                lambda_snapshot,
                blacklist_size: self.blacklist.len(),
            });
        }

        let choice = self.reidentify(detections.iter().map(|d| (d.track_id, &d.feature)))?;
        match choice {
            Some((id, d)) => {
                let det = detections
                    .iter()
                    .find(|det| det.track_id == id)
                    .expect("chosen id comes from this frame");
                let x = self.prepare(&det.feature).into_owned();
                self.update_models(&x, d)?;
                self.tracked_id = id;
                self.stable_run = 0;
                self.blacklist.remove(&id);
                Ok(Decision {
                    frame_index,
                    kind: DecisionKind::Reidentified,
                    track_id: Some(id),
                    distance: Some(d),
                    lambda_snapshot,
                    blacklist_size: self.blacklist.len(),
                })
            }
            None => Ok(Decision {
                frame_index,
                kind: DecisionKind::Lost,
                track_id: None,
                distance: None,
                lambda_snapshot,
                blacklist_size: self.blacklist.len(),
            }),
        }
    }

    /// Closest non-blacklisted candidate strictly inside the gate, ties going
    /// to the smallest track ID. Candidates carrying the bound ID are skipped.
    pub fn reidentify<'a, I>(&self, candidates: I) -> Result<Option<(u64, f64)>>
    where
        I: IntoIterator<Item = (u64, &'a FeatureVector)>,
    {
        let gate = self.threshold.lambda_d();
        let mut best: Option<(u64, f64)> = None;
        for (id, feature) in candidates {
            if id == self.tracked_id || self.blacklist.contains(&id) {
                continue;
            }
            check_dim(self.config.feature_dim, feature.dim())?;
            let d = self.target.distance(&self.prepare(feature), self.config.eps_sigma)?;
            if !(d < gate) {
                continue;
            }
            best = match best {
                Some((bid, bd)) if bd < d || (bd == d && bid < id) => Some((bid, bd)),
                _ => Some((id, d)),
            };
        }
        Ok(best)
    }

    /// Refreshes the target model with `x` and the gate with its distance `d`.
    /// Both damping factors are derived from `d` and the gate before the update.
    pub fn update_models(&mut self, x: &[f64], d: f64) -> Result<()> {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidParameter { name: "distance", value: d });
        }
        let lambda_old = self.threshold.lambda_d();
        let (df, dl) = match self.config.damping {
            DampingMode::Damped => (delta_f(d), delta_lambda(d, lambda_old)),
            DampingMode::Undamped => (1.0, DeltaLambda { value: 1.0, fallback: false }),
        };
        let warm = self.target.n_feat() >= self.config.threshold_warmup;
        self.target.update(x, df)?;
        if warm {
            if dl.fallback {
                self.lambda_fallbacks += 1;
            }
            self.threshold.update(d, dl.value)?;
        }
        Ok(())
    }

    /// FNV-1a digest over the complete engine state, floats by bit pattern.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.u64(self.tracked_id);
        h.u64(u64::from(self.stable_run));
        h.u64(self.lambda_fallbacks);
        h.u64(u64::from(self.target.n_feat()));
        h.floats(self.target.mu());
        h.floats(self.target.sigma());
        h.u64(u64::from(self.threshold.n_dist()));
        h.floats(&[self.threshold.mu_d(), self.threshold.sigma_d(), self.threshold.lambda_d()]);
        h.u64(self.blacklist.len() as u64);
        for id in &self.blacklist {
            h.u64(*id);
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    fn u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn floats(&mut self, vs: &[f64]) {
        for v in vs {
            self.u64(v.to_bits());
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
