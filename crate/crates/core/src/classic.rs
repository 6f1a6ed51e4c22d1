//! One-dimensional classic Kalman filter, written in information form.
//!
//! Used as the reference answer for linear measurement models.

use crate::belief::{GaussianBelief, Measurement};
use crate::error::{FilterError, Result};
use crate::scalar::Scalar;

/// Posterior for `z = a x + b + v`, `v ~ N(0, τ²)`, with `τ > 0`:
/// `P = (1/σ² + a²/τ²)⁻¹`, `m = P (μ/σ² + a (z − b)/τ²)`.
pub fn kalman_update<T: Scalar>(
    prior: &GaussianBelief<T>,
    slope: T,
    offset: T,
    obs: &Measurement<T>,
) -> Result<GaussianBelief<T>> {
    let r = obs.noise_variance();
    let p = prior.variance();
    if !(r > T::zero()) || !(p > T::zero()) {
        return Err(FilterError::Degenerate("information form needs positive prior and noise variances"));
    }
    let info = p.recip() + slope * slope / r;
    let var = info.recip();
    let mean = var * (prior.mean() / p + slope * (obs.z_obs() - offset) / r);
    GaussianBelief::new(mean, var)
}
