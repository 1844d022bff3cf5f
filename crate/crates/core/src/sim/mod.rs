//! Synthetic detection streams with ground truth.
//!
//! Each person has a latent appearance vector. Latent centers sit on an
//! orthogonal (simplex-like) arrangement, then follow a Gaussian random walk;
//! every visible person emits one detection per frame whose feature is the
//! latent vector plus isotropic Gaussian noise. An MOT emulator hands out
//! monotonically increasing track IDs: a person keeps its ID while
//! continuously visible and receives a fresh one on re-entry.

mod rng;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::feature::{Detection, FeatureVector};

pub use rng::{SimRng, PRNG_NAME};

/// Person hidden from the camera for `[start_frame, start_frame + duration_frames)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Occlusion {
    pub person_index: usize,
    pub start_frame: u64,
    pub duration_frames: u64,
}

/// Instantaneous latent jump of length `magnitude` in a random direction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AppearanceChange {
    pub person_index: usize,
    pub frame: u64,
    pub magnitude: f64,
}

/// Hard MOT identity switch: from `frame` on, the two persons' track IDs are exchanged.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdSwap {
    pub frame: u64,
    pub person_a: usize,
    pub person_b: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(deny_unknown_fields))]
pub struct ScenarioConfig {
    pub seed: u64,
    pub num_frames: u64,
    pub fps: f64,
    pub num_persons: usize,
    pub feature_dim: usize,
    /// Pairwise distance between latent centers, in units of the expected
    /// observation-noise norm `obs_noise_sd * sqrt(feature_dim)`.
    pub base_separation: f64,
    /// Per-frame random-walk step sd, per dimension.
    pub drift_sd: f64,
    /// Observation noise sd, per dimension.
    pub obs_noise_sd: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub occlusion_events: Vec<Occlusion>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub appearance_changes: Vec<AppearanceChange>,
    #[cfg_attr(feature = "serde", serde(default = "default_true"))]
    pub id_switch_on_reentry: bool,
    #[cfg_attr(feature = "serde", serde(default))]
    pub id_swaps: Vec<IdSwap>,
}

#[cfg(feature = "serde")]
fn default_true() -> bool {
    true
}

/// Target (person 0) occlusions of the canonical benchmark: (start, duration).
const LAB_OCCLUSIONS: [(u64, u64); 6] =
    [(600, 60), (1400, 90), (2200, 120), (3000, 150), (3800, 75), (4600, 105)];
const LAB_CHANGE_FRAMES: [u64; 2] = [1000, 3400];

impl ScenarioConfig {
    /// Canonical benchmark: three persons, 256-D features, three minutes at
    /// 30 fps, six target occlusions of 60 to 150 frames and two target
    /// appearance changes of twice the noise norm.
    pub fn lab_default(seed: u64) -> Self {
        let feature_dim = 256;
        let obs_noise_sd = 0.1;
        let magnitude = 2.0 * obs_noise_sd * libm::sqrt(feature_dim as f64);
        Self {
            seed,
            num_frames: 5400,
            fps: 30.0,
            num_persons: 3,
            feature_dim,
            base_separation: 6.0,
            drift_sd: 0.001,
            obs_noise_sd,
            occlusion_events: LAB_OCCLUSIONS
                .iter()
                .map(|&(start_frame, duration_frames)| Occlusion {
                    person_index: 0,
                    start_frame,
                    duration_frames,
                })
                .collect(),
            appearance_changes: LAB_CHANGE_FRAMES
                .iter()
                .map(|&frame| AppearanceChange { person_index: 0, frame, magnitude })
                .collect(),
            id_switch_on_reentry: true,
            id_swaps: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut p: Vec<String> = Vec::new();
        if self.num_frames == 0 {
            p.push("num_frames must be positive".into());
        }
        if !(self.fps > 0.0) || !self.fps.is_finite() {
            p.push(format!("fps must be positive, got {}", self.fps));
        }
        if self.num_persons == 0 {
            p.push("num_persons must be positive".into());
        }
        if self.feature_dim == 0 {
            p.push("feature_dim must be positive".into());
        }
        if self.num_persons > self.feature_dim {
            p.push(format!(
                "num_persons ({}) cannot exceed feature_dim ({})",
                self.num_persons, self.feature_dim
            ));
        }
        for (name, v) in [
            ("base_separation", self.base_separation),
            ("drift_sd", self.drift_sd),
            ("obs_noise_sd", self.obs_noise_sd),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                p.push(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        for (i, o) in self.occlusion_events.iter().enumerate() {
            if o.person_index >= self.num_persons {
                p.push(format!("occlusion_events[{i}]: person_index {} out of range", o.person_index));
            }
            if o.start_frame >= self.num_frames {
                p.push(format!("occlusion_events[{i}]: start_frame {} out of range", o.start_frame));
            }
            if o.duration_frames == 0 {
                p.push(format!("occlusion_events[{i}]: duration_frames must be at least 1"));
            }
        }
        for (i, c) in self.appearance_changes.iter().enumerate() {
            if c.person_index >= self.num_persons {
                p.push(format!("appearance_changes[{i}]: person_index {} out of range", c.person_index));
            }
            if c.frame >= self.num_frames {
                p.push(format!("appearance_changes[{i}]: frame {} out of range", c.frame));
            }
            if !(c.magnitude >= 0.0) || !c.magnitude.is_finite() {
                p.push(format!("appearance_changes[{i}]: magnitude must be finite and non-negative"));
            }
        }
        for (i, s) in self.id_swaps.iter().enumerate() {
            if s.person_a >= self.num_persons || s.person_b >= self.num_persons {
                p.push(format!("id_swaps[{i}]: person index out of range"));
            }
            if s.frame >= self.num_frames {
                p.push(format!("id_swaps[{i}]: frame {} out of range", s.frame));
            }
        }
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(p))
        }
    }

    fn is_occluded(&self, person: usize, frame: u64) -> bool {
        self.occlusion_events.iter().any(|o| {
            o.person_index == person && frame >= o.start_frame && frame - o.start_frame < o.duration_frames
        })
    }
}

/// Per-frame, per-person visibility and track ID.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    presence: Vec<Vec<Option<u64>>>,
}

impl GroundTruth {
    fn from_frames(num_persons: usize, frames: &[Vec<Detection>]) -> Result<Self> {
        let mut presence = Vec::with_capacity(frames.len());
        for (f, dets) in frames.iter().enumerate() {
            let mut row = vec![None; num_persons];
            for det in dets {
                let Some(pid) = det.person_id else {
                    return Err(Error::Validation(vec![format!(
                        "frame {f}: detection {} has no person_id",
                        det.track_id
                    )]));
                };
                let slot = usize::try_from(pid).ok().filter(|&p| p < num_persons).ok_or_else(|| {
                    Error::Validation(vec![format!("frame {f}: person_id {pid} out of range")])
                })?;
                if row[slot].replace(det.track_id).is_some() {
                    return Err(Error::Validation(vec![format!("frame {f}: person {pid} detected twice")]));
                }
            }
            presence.push(row);
        }
        Ok(Self { presence })
    }

    pub fn num_frames(&self) -> usize {
        self.presence.len()
    }

    /// Track ID carried by `person` at `frame`, or `None` when not visible.
    pub fn track_id(&self, frame: usize, person: usize) -> Option<u64> {
        self.presence.get(frame)?.get(person).copied().flatten()
    }

    pub fn is_visible(&self, frame: usize, person: usize) -> bool {
        self.track_id(frame, person).is_some()
    }

    /// Person carrying `track_id` at `frame`.
    pub fn person_of(&self, frame: usize, track_id: u64) -> Option<usize> {
        self.presence.get(frame)?.iter().position(|t| *t == Some(track_id))
    }
}

/// A generated detection stream and its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    /// Detections of each frame, ordered by track ID.
    pub frames: Vec<Vec<Detection>>,
    pub ground_truth: GroundTruth,
}

impl Scenario {
    /// Reassembles a scenario from its config and frames, rebuilding the
    /// ground-truth table from the detections' person IDs.
    pub fn from_frames(config: ScenarioConfig, frames: Vec<Vec<Detection>>) -> Result<Self> {
        let ground_truth = GroundTruth::from_frames(config.num_persons, &frames)?;
        Ok(Self { config, frames, ground_truth })
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    /// Applies an MOT identity switch between two persons from `frame` on and
    /// records it in the config.
    pub fn inject_distractor_swap(self, frame: u64, person_a: usize, person_b: usize) -> Result<Self> {
        let swap = IdSwap { frame, person_a, person_b };
        let mut config = self.config;
        let mut frames = self.frames;
        let mut gt = self.ground_truth;
        apply_swap(&mut frames, &mut gt, &swap, config.num_persons)?;
        if person_a != person_b {
            config.id_swaps.push(swap);
        }
        Ok(Self { config, frames, ground_truth: gt })
    }
}

fn apply_swap(
    frames: &mut [Vec<Detection>],
    gt: &mut GroundTruth,
    swap: &IdSwap,
    num_persons: usize,
) -> Result<()> {
    let IdSwap { frame, person_a, person_b } = *swap;
    let f = usize::try_from(frame).unwrap_or(usize::MAX);
    let mut problems = Vec::new();
    if person_a >= num_persons || person_b >= num_persons {
        problems.push(format!("swap at frame {frame}: person index out of range"));
    } else {
        for p in [person_a, person_b] {
            if !gt.is_visible(f, p) {
                problems.push(format!("swap at frame {frame}: person {p} is not visible"));
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    if person_a == person_b {
        return Ok(());
    }
    let ta = gt.track_id(f, person_a).expect("checked visible");
    let tb = gt.track_id(f, person_b).expect("checked visible");
    for dets in &mut frames[f..] {
        for det in dets.iter_mut() {
            if det.track_id == ta {
                det.track_id = tb;
            } else if det.track_id == tb {
                det.track_id = ta;
            }
        }
        dets.sort_by_key(|d| d.track_id);
    }
    for row in &mut gt.presence[f..] {
        for t in row.iter_mut() {
            if *t == Some(ta) {
                *t = Some(tb);
            } else if *t == Some(tb) {
                *t = Some(ta);
            }
        }
    }
    Ok(())
}

/// Orthonormal directions via Gram-Schmidt on Gaussian draws.
fn orthonormal_directions(rng: &mut SimRng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v = vec![0.0; dim];
        rng.fill_normal(&mut v, 1.0);
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-9 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

fn random_unit(rng: &mut SimRng, dim: usize) -> Vec<f64> {
    orthonormal_directions(rng, 1, dim).pop().expect("one direction")
}

// c_p = r * u_p with orthonormal u_p, so |c_p - c_q| = r * sqrt(2)
fn draw_centers(rng: &mut SimRng, config: &ScenarioConfig) -> Vec<Vec<f64>> {
    let dim = config.feature_dim;
    let separation = config.base_separation * config.obs_noise_sd * libm::sqrt(dim as f64);
    let radius = separation / core::f64::consts::SQRT_2;
    orthonormal_directions(rng, config.num_persons, dim)
        .into_iter()
        .map(|u| u.into_iter().map(|x| x * radius).collect())
        .collect()
}

/// Initial latent appearance of every person; the first draws of the
/// scenario's generator.
pub fn latent_centers(config: &ScenarioConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    Ok(draw_centers(&mut SimRng::new(config.seed), config))
}

/// Generates the scenario described by `config`, deterministically in its seed.
pub fn generate(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let dim = config.feature_dim;
    let persons = config.num_persons;
    let mut rng = SimRng::new(config.seed);

    let mut latent = draw_centers(&mut rng, config);

    let mut changes: BTreeMap<(u64, usize), Vec<f64>> = BTreeMap::new();
    for c in &config.appearance_changes {
        changes.entry((c.frame, c.person_index)).or_default().push(c.magnitude);
    }

    let mut next_id: u64 = 1;
    let mut current_id: Vec<Option<u64>> = vec![None; persons];
    let mut was_visible = vec![false; persons];
    let mut step = vec![0.0; dim];
    let mut frames = Vec::with_capacity(config.num_frames as usize);

    for frame in 0..config.num_frames {
        let timestamp = frame as f64 / config.fps;
        let mut dets = Vec::new();
        for p in 0..persons {
            if frame > 0 && config.drift_sd > 0.0 {
                rng.fill_normal(&mut step, config.drift_sd);
                latent[p].iter_mut().zip(&step).for_each(|(x, s)| *x += s);
            }
            if let Some(mags) = changes.get(&(frame, p)) {
                for &m in mags {
                    let dir = random_unit(&mut rng, dim);
                    latent[p].iter_mut().zip(&dir).for_each(|(x, u)| *x += m * u);
                }
            }
            let visible = !config.is_occluded(p, frame);
            if visible {
                let id = match current_id[p] {
                    Some(id) if was_visible[p] || !config.id_switch_on_reentry => id,
                    _ => {
                        let id = next_id;
                        next_id += 1;
                        id
                    }
                };
                current_id[p] = Some(id);
                let mut values = latent[p].clone();
                if config.obs_noise_sd > 0.0 {
                    rng.fill_normal(&mut step, config.obs_noise_sd);
                    values.iter_mut().zip(&step).for_each(|(x, s)| *x += s);
                }
                dets.push(Detection {
                    frame_index: frame,
                    timestamp,
                    track_id: id,
                    feature: FeatureVector::new(values)?,
                    person_id: Some(p as u64),
                    bbox: None,
                });
            }
            was_visible[p] = visible;
        }
        dets.sort_by_key(|d| d.track_id);
        frames.push(dets);
    }

    let mut gt = GroundTruth::from_frames(persons, &frames)?;
    for swap in &config.id_swaps {
        apply_swap(&mut frames, &mut gt, swap, persons)?;
    }
    Ok(Scenario { config: config.clone(), frames, ground_truth: gt })
}
