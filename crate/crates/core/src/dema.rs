//! Damped exponential moving average.
//!
//! A DEMA is an EMA whose effective window `N_damp = N * delta` is scaled on
//! every update by a damping factor `delta`:
//!
//! ```text
//! alpha  = 2 / (N * delta + 1)
//! value' = alpha * psi + (1 - alpha) * value
//! ```
//!
//! `N` counts the updates applied so far and is clamped at `n_max`, so the
//! average never freezes. The first update (`N = 0`) assigns `psi` outright
//! instead of applying `alpha = 2`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::feature::check_dim;

/// Default cap on the update counter.
pub const DEFAULT_N_MAX: u32 = 100;

/// Lower bound on the feature damping factor, keeping `alpha` bounded when
/// the distance is zero.
pub const DELTA_F_FLOOR: f64 = 1e-3;

/// Adaptive weight `2 / (n * delta + 1)`.
pub fn alpha_damp(n: u32, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    Ok(2.0 / (f64::from(n) * delta + 1.0))
}

/// Feature-model damping factor `min(1, d / 2)`, floored at [`DELTA_F_FLOOR`].
pub fn delta_f(d: f64) -> f64 {
    (d / 2.0).clamp(DELTA_F_FLOOR, 1.0)
}

/// Threshold-model damping factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaLambda {
    pub value: f64,
    /// Set when the threshold was not positive and `value` fell back to 1.
    pub fallback: bool,
}

/// Threshold-model damping factor `max(1, 2 d / lambda_d)`.
pub fn delta_lambda(d: f64, lambda_d: f64) -> DeltaLambda {
    if !(lambda_d > 0.0) || !lambda_d.is_finite() {
        return DeltaLambda { value: 1.0, fallback: true };
    }
    DeltaLambda { value: (2.0 * d / lambda_d).max(1.0), fallback: false }
}

/// Values a DEMA can smooth: scalars and fixed-length vectors.
pub trait DemaValue: Clone {
    fn check_shape(&self, psi: &Self) -> Result<()>;
    fn check_finite(&self) -> Result<()>;
    /// `self = alpha * psi + (1 - alpha) * self`
    fn blend(&mut self, psi: &Self, alpha: f64);
}

impl DemaValue for f64 {
    fn check_shape(&self, _psi: &Self) -> Result<()> {
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { index: 0 })
        }
    }

    #[inline]
    fn blend(&mut self, psi: &Self, alpha: f64) {
        *self = alpha * psi + (1.0 - alpha) * *self;
    }
}

impl DemaValue for Vec<f64> {
    fn check_shape(&self, psi: &Self) -> Result<()> {
        check_dim(self.len(), psi.len())
    }

    fn check_finite(&self) -> Result<()> {
        crate::feature::check_finite(self)
    }

    fn blend(&mut self, psi: &Self, alpha: f64) {
        let keep = 1.0 - alpha;
        for (v, p) in self.iter_mut().zip(psi) {
            *v = alpha * p + keep * *v;
        }
    }
}

/// A DEMA accumulator: the smoothed value plus its update counter.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DemaState<T> {
    value: T,
    n: u32,
    n_max: u32,
}

impl<T: DemaValue> DemaState<T> {
    /// A fresh accumulator; the first update replaces `initial`.
    pub fn new(initial: T, n_max: u32) -> Result<Self> {
        Self::with_count(initial, 0, n_max)
    }

    /// An accumulator that already counts `n` updates.
    pub fn with_count(initial: T, n: u32, n_max: u32) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter { name: "n_max", value: 0.0 });
        }
        initial.check_finite()?;
        Ok(Self { value: initial, n: n.min(n_max), n_max })
    }

    #[inline]
    pub fn value(&self) -> &T {
        &self.value
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// True until the first update has been applied.
    pub fn is_pending(&self) -> bool {
        self.n == 0
    }

    /// Applies one damped update and returns the weight used (1 on bootstrap).
    pub fn update(&mut self, psi: &T, delta: f64) -> Result<f64> {
        self.value.check_shape(psi)?;
        psi.check_finite()?;
        let alpha = if self.n == 0 {
            // validates delta even though the bootstrap ignores it
            alpha_damp(0, delta)?;
            self.value = psi.clone();
            1.0
        } else {
            let alpha = alpha_damp(self.n, delta)?;
            self.value.blend(psi, alpha);
            alpha
        };
        self.n = (self.n + 1).min(self.n_max);
        Ok(alpha)
    }

    /// Mutable access for invariant repair by owning models.
    pub(crate) fn value_mut(&mut self) -> &mut T {
        &mut self.value
    }
}
