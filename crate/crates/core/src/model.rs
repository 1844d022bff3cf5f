//! The ideal-target representation and the adaptive re-identification gate.

use alloc::vec;
use alloc::vec::Vec;

use crate::dema::DemaState;
use crate::error::{Error, Result};
use crate::feature::{
    check_dim, check_finite, elementwise_squared_deviation, scalar_squared_deviation, statistical_distance,
};

/// Per-dimension appearance mean and dispersion of the tracked person.
///
/// `sigma` smooths element-wise squared deviations and is used un-rooted as the
/// distance scale. Both accumulators advance together and share one count.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TargetModel {
    mu: DemaState<Vec<f64>>,
    sigma: DemaState<Vec<f64>>,
}

impl TargetModel {
    /// `mu := initial`, `sigma := 0`, one update counted.
    pub fn bootstrap(initial: &[f64], n_max: u32) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mu = DemaState::with_count(initial.to_vec(), 1, n_max)?;
        let sigma = DemaState::with_count(vec![0.0; initial.len()], 1, n_max)?;
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> &[f64] {
        self.mu.value()
    }

    pub fn sigma(&self) -> &[f64] {
        self.sigma.value()
    }

    pub fn n_feat(&self) -> u32 {
        self.mu.n()
    }

    pub fn n_max(&self) -> u32 {
        self.mu.n_max()
    }

    pub fn dim(&self) -> usize {
        self.mu.value().len()
    }

    pub fn distance(&self, x: &[f64], eps: f64) -> Result<f64> {
        statistical_distance(x, self.mu(), self.sigma(), eps)
    }

    /// Folds `x` into the model with damping `delta`. The squared deviation is
    /// taken against the pre-update mean.
    pub fn update(&mut self, x: &[f64], delta: f64) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        let var = elementwise_squared_deviation(self.mu(), x)?;
        self.mu.update(&x.to_vec(), delta)?;
        self.sigma.update(&var, delta)?;
        // alpha > 1 (tiny delta, low count) extrapolates and can cross zero
        for s in self.sigma.value_mut().iter_mut() {
            if *s < 0.0 {
                *s = 0.0;
            }
        }
        Ok(())
    }
}

/// Running statistics of the target's own distances and the gate derived
/// from them, `lambda_d = mu_d + 2 sigma_d`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdModel {
    mu_d: DemaState<f64>,
    sigma_d: DemaState<f64>,
    lambda_d: f64,
}

impl ThresholdModel {
    /// An empty model gating at `lambda_init` until the first update.
    pub fn new(lambda_init: f64, n_max: u32) -> Result<Self> {
        if !(lambda_init > 0.0) || !lambda_init.is_finite() {
            return Err(Error::InvalidParameter { name: "lambda_init", value: lambda_init });
        }
        Ok(Self {
            mu_d: DemaState::new(0.0, n_max)?,
            sigma_d: DemaState::new(0.0, n_max)?,
            lambda_d: lambda_init,
        })
    }

    pub fn mu_d(&self) -> f64 {
        *self.mu_d.value()
    }

    pub fn sigma_d(&self) -> f64 {
        *self.sigma_d.value()
    }

    pub fn lambda_d(&self) -> f64 {
        self.lambda_d
    }

    pub fn n_dist(&self) -> u32 {
        self.mu_d.n()
    }

    pub fn n_max(&self) -> u32 {
        self.mu_d.n_max()
    }

    /// True until a distance has been folded in.
    pub fn is_pending(&self) -> bool {
        self.mu_d.is_pending()
    }

    /// Folds distance `d` in with damping `delta`. On the first update the
    /// deviation is zero, so `sigma_d` starts at 0 and `lambda_d = d`.
    pub fn update(&mut self, d: f64, delta: f64) -> Result<()> {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidParameter { name: "distance", value: d });
        }
        let var_d = if self.is_pending() { 0.0 } else { scalar_squared_deviation(self.mu_d(), d)? };
        self.mu_d.update(&d, delta)?;
        self.sigma_d.update(&var_d, delta)?;
        self.lambda_d = self.mu_d() + 2.0 * self.sigma_d();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bootstrap_fields() {
        let m = TargetModel::bootstrap(&[1.0, 2.0], 100).unwrap();
        assert_eq!(m.mu(), &[1.0, 2.0]);
        assert_eq!(m.sigma(), &[0.0, 0.0]);
        assert_eq!(m.n_feat(), 1);
        assert!(TargetModel::bootstrap(&[], 100).is_err());
    }

    #[test]
    fn update_at_mean_keeps_mu_and_decays_sigma() {
        let mut m = TargetModel::bootstrap(&[1.0, -1.0], 100).unwrap();
        m.update(&[3.0, 1.0], 1.0).unwrap();
        let mu = m.mu().to_vec();
        let s0 = m.sigma().to_vec();
        assert!(s0.iter().all(|v| *v > 0.0));
        m.update(&mu, 1.0).unwrap();
        assert_eq!(m.mu(), &mu[..]);
        assert!(m.sigma().iter().zip(&s0).all(|(a, b)| a < b));
    }

    #[test]
    fn sigma_uses_pre_update_mean() {
        let mut m = TargetModel::bootstrap(&[0.0], 100).unwrap();
        // n = 1, delta = 1 -> alpha = 1: both accumulators take psi outright
        m.update(&[2.0], 1.0).unwrap();
        assert_eq!(m.mu(), &[2.0]);
        assert_eq!(m.sigma(), &[4.0]);
    }

    #[test]
    fn sigma_never_negative_under_extrapolation() {
        let mut m = TargetModel::bootstrap(&[0.0, 0.0], 100).unwrap();
        m.update(&[1.0, 1.0], 1.0).unwrap();
        // alpha = 2 / (2 * 0.001 + 1) ~ 2 with a zero deviation sample
        m.update(&[1.0, 1.0], 1e-3).unwrap();
        assert!(m.sigma().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn update_is_atomic_on_error() {
        let mut m = TargetModel::bootstrap(&[0.0, 0.0], 100).unwrap();
        let before = m.clone();
        assert!(m.update(&[1.0], 1.0).is_err());
        assert!(m.update(&[1.0, f64::NAN], 1.0).is_err());
        assert_eq!(m, before);
    }

    #[test]
    fn threshold_first_update_bootstraps() {
        let mut t = ThresholdModel::new(1.0, 100).unwrap();
        assert_eq!(t.lambda_d(), 1.0);
        t.update(0.5, 1.0).unwrap();
        assert_eq!((t.mu_d(), t.sigma_d(), t.lambda_d()), (0.5, 0.0, 0.5));
        assert_eq!(t.n_dist(), 1);
    }

    #[test]
    fn threshold_is_mean_plus_two_spread() {
        let mut t = ThresholdModel::new(1.0, 100).unwrap();
        t.update(0.4, 1.0).unwrap();
        // n = 1, delta = 1: alpha = 1, var_d = (0.5 - 0.4)^2
        t.update(0.5, 1.0).unwrap();
        assert_eq!(t.mu_d(), 0.5);
        assert!((t.sigma_d() - 0.01).abs() < 1e-15);
        assert_eq!(t.lambda_d(), t.mu_d() + 2.0 * t.sigma_d());
    }

    #[test]
    fn threshold_rejects_bad_inputs() {
        assert!(ThresholdModel::new(0.0, 100).is_err());
        assert!(ThresholdModel::new(1.0, 0).is_err());
        let mut t = ThresholdModel::new(1.0, 100).unwrap();
        assert!(t.update(-0.1, 1.0).is_err());
        assert!(t.update(f64::NAN, 1.0).is_err());
        assert!(t.is_pending());
    }
}
