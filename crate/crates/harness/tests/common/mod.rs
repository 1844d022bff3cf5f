//! Brute-force reference engine, written independently of `carpe-core`'s
//! model types: plain vectors, every distance recomputed per frame, and the
//! winner found by comparing every candidate against every other one.

#![allow(dead_code)]

use carpe_core::{DampingMode, Decision, DecisionKind, Detection, EngineConfig};

#[derive(Debug, Clone)]
pub struct RefEngine {
    cfg: EngineConfig,
    pub tracked: u64,
    mu: Vec<f64>,
    sigma: Vec<f64>,
    n_feat: u32,
    mu_d: f64,
    sigma_d: f64,
    n_dist: u32,
    pub lambda: f64,
    pub blacklist: Vec<u64>,
    stable: u32,
}

fn dema(old: f64, psi: f64, n: u32, delta: f64) -> f64 {
    if n == 0 {
        psi
    } else {
        let a = 2.0 / (f64::from(n) * delta + 1.0);
        a * psi + (1.0 - a) * old
    }
}

impl RefEngine {
    pub fn new(cfg: EngineConfig, id: u64, feature: &[f64]) -> Self {
        let mu = Self::prep_with(&cfg, feature);
        let dim = mu.len();
        Self {
            lambda: cfg.lambda_init,
            cfg,
            tracked: id,
            mu,
            sigma: vec![0.0; dim],
            n_feat: 1,
            mu_d: 0.0,
            sigma_d: 0.0,
            n_dist: 0,
            blacklist: Vec::new(),
            stable: 0,
        }
    }

    fn prep_with(cfg: &EngineConfig, f: &[f64]) -> Vec<f64> {
        if !cfg.normalize_features {
            return f.to_vec();
        }
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            f.to_vec()
        } else {
            f.iter().map(|v| v / norm).collect()
        }
    }

    pub fn distance(&self, raw: &[f64]) -> f64 {
        let x = Self::prep_with(&self.cfg, raw);
        let mut acc = 0.0;
        for ((xi, mi), si) in x.iter().zip(&self.mu).zip(&self.sigma) {
            let z = (xi - mi) / si.max(self.cfg.eps_sigma);
            acc += z * z;
        }
        (acc / x.len() as f64).sqrt()
    }

    fn update(&mut self, raw: &[f64], d: f64) {
        let x = Self::prep_with(&self.cfg, raw);
        let (df, dl) = match self.cfg.damping {
            DampingMode::Undamped => (1.0, 1.0),
            DampingMode::Damped => {
                let df = if d / 2.0 < 1.0 { d / 2.0 } else { 1.0 };
                let df = if df < 1e-3 { 1e-3 } else { df };
                let dl = if self.lambda > 0.0 {
                    let r = 2.0 * d / self.lambda;
                    if r > 1.0 {
                        r
                    } else {
                        1.0
                    }
                } else {
                    1.0
                };
                (df, dl)
            }
        };
        let warm = self.n_feat >= self.cfg.threshold_warmup;
        #[allow(clippy::needless_range_loop)]
        for i in 0..x.len() {
            let var = (x[i] - self.mu[i]) * (x[i] - self.mu[i]);
            self.mu[i] = dema(self.mu[i], x[i], self.n_feat, df);
            self.sigma[i] = dema(self.sigma[i], var, self.n_feat, df).max(0.0);
        }
        self.n_feat = (self.n_feat + 1).min(self.cfg.n_max);
        if warm {
            let var_d = if self.n_dist == 0 { 0.0 } else { (d - self.mu_d) * (d - self.mu_d) };
            self.mu_d = dema(self.mu_d, d, self.n_dist, dl);
            self.sigma_d = dema(self.sigma_d, var_d, self.n_dist, dl);
            self.n_dist = (self.n_dist + 1).min(self.cfg.n_max);
            self.lambda = self.mu_d + 2.0 * self.sigma_d;
        }
    }

    pub fn step(&mut self, frame: u64, dets: &[Detection]) -> Decision {
        let snapshot = self.lambda;
        let decision = |kind, id, d, bl: usize| Decision {
            frame_index: frame,
            kind,
            track_id: id,
            distance: d,
            lambda_snapshot: snapshot,
            blacklist_size: bl,
        };

        if let Some(det) = dets.iter().find(|d| d.track_id == self.tracked) {
            let d = self.distance(det.feature.as_slice());
            self.update(det.feature.as_slice(), d);
            self.stable += 1;
            if self.cfg.blacklist_enabled && self.stable >= self.cfg.blacklist_stable_frames {
                for o in dets {
                    if o.track_id != self.tracked && !self.blacklist.contains(&o.track_id) {
                        self.blacklist.push(o.track_id);
                    }
                }
            }
            return decision(DecisionKind::DirectTrack, Some(self.tracked), Some(d), self.blacklist.len());
        }

        let passing: Vec<(u64, f64, &Detection)> = dets
            .iter()
            .filter(|c| !self.blacklist.contains(&c.track_id))
            .map(|c| (c.track_id, self.distance(c.feature.as_slice()), c))
            .filter(|&(_, d, _)| d < self.lambda)
            .collect();
        let winner = passing.iter().find(|&&(id, d, _)| {
            passing.iter().all(|&(oid, od, _)| oid == id || d < od || (d == od && id < oid))
        });
        match winner {
            Some(&(id, d, det)) => {
                self.update(det.feature.as_slice(), d);
                self.tracked = id;
                self.stable = 0;
                self.blacklist.retain(|&b| b != id);
                decision(DecisionKind::Reidentified, Some(id), Some(d), self.blacklist.len())
            }
            None => decision(DecisionKind::Lost, None, None, self.blacklist.len()),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Kind, track and blacklist size must match exactly; reals to 1e-12 relative.
pub fn same_decision(a: &Decision, b: &Decision) -> bool {
    a.frame_index == b.frame_index
        && a.kind == b.kind
        && a.track_id == b.track_id
        && a.blacklist_size == b.blacklist_size
        && close(a.lambda_snapshot, b.lambda_snapshot)
        && match (a.distance, b.distance) {
            (Some(x), Some(y)) => close(x, y),
            (None, None) => true,
            _ => false,
        }
}
