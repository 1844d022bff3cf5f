//! Appearance features, detections and the σ-scaled statistical distance.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default floor applied to σ components in distance denominators.
pub const DEFAULT_EPS_SIGMA: f64 = 1e-6;

/// A finite, non-empty appearance embedding.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<f64>", into = "Vec<f64>")
)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        check_finite(&values)?;
        Ok(Self(values))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Unit-L2-norm copy. A zero vector is returned unchanged.
    pub fn l2_normalized(&self) -> Self {
        let norm = libm::sqrt(self.0.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return self.clone();
        }
        Self(self.0.iter().map(|v| v / norm).collect())
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(f: FeatureVector) -> Self {
        f.0
    }
}

/// One observed person in one frame.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Detection {
    pub frame_index: u64,
    /// Seconds since stream start.
    pub timestamp: f64,
    /// MOT-assigned track ID.
    pub track_id: u64,
    pub feature: FeatureVector,
    /// Ground-truth identity, filled by the simulator only.
    #[cfg_attr(feature = "serde", serde(default))]
    pub person_id: Option<u64>,
    /// Pixel box, carried through untouched.
    #[cfg_attr(feature = "serde", serde(default))]
    pub bbox: Option<[f64; 4]>,
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

#[inline]
pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Root-mean-square of the per-dimension deviations `(x_i - mu_i) / max(sigma_i, eps)`.
///
/// With every `sigma_i >= eps` this is exactly the unfloored statistic.
pub fn statistical_distance(x: &[f64], mu: &[f64], sigma: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter { name: "eps", value: eps });
    }
    check_dim(mu.len(), x.len())?;
    check_dim(mu.len(), sigma.len())?;
    if x.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    check_finite(x)?;
    let mut acc = 0.0;
    for ((&xi, &mi), &si) in x.iter().zip(mu).zip(sigma) {
        let z = (xi - mi) / si.max(eps);
        acc += z * z;
    }
    Ok(libm::sqrt(acc / x.len() as f64))
}

/// Per-dimension squared deviation `(x_i - mu_i)^2`.
pub fn elementwise_squared_deviation(mu: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_dim(mu.len(), x.len())?;
    Ok(mu
        .iter()
        .zip(x)
        .map(|(&m, &v)| {
            let dev = v - m;
            dev * dev
        })
        .collect())
}

pub fn scalar_squared_deviation(mu_d: f64, d: f64) -> Result<f64> {
    if !mu_d.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    if !d.is_finite() {
        return Err(Error::NonFinite { index: 1 });
    }
    let dev = d - mu_d;
    Ok(dev * dev)
}
