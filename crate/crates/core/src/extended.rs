//! Linearization-based measurement updates: EKF, IEKF and OCEKF.
//!
//! All three are the same Gaussian update linearized at a different point
//! `y`: the prior mean (EKF), the posterior mean itself (IEKF, a fixed
//! point), or the back-transformed observation `h⁻¹(z_obs)` (OCEKF).

use crate::belief::{GaussianBelief, IterationControl, IterationStart, Measurement, Update, UpdateWarning};
use crate::error::{FilterError, Result};
use crate::models::MeasurementModel;
use crate::scalar::Scalar;

/// Gaussian update with `h` linearized at `y`.
///
/// Uses the gain form, so `tau = 0` gives an exactly zero variance.
pub fn linearized_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    y: T,
) -> Result<GaussianBelief<T>> {
    let slope = model.derivative(y)?;
    if slope == T::zero() || !slope.is_finite() {
        return Err(FilterError::Degenerate("measurement slope vanished at the linearization point"));
    }
    let var = prior.variance();
    let denom = slope * slope * var + obs.noise_variance();
    if !(denom > T::zero()) {
        return Err(FilterError::Degenerate("zero prior variance and zero measurement noise"));
    }
    let gain = slope * var / denom;
    let innovation = obs.z_obs() - model.value(y)? + slope * (y - prior.mean());
    GaussianBelief::new(prior.mean() + gain * innovation, var * obs.noise_variance() / denom)
}

pub fn ekf_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
) -> Result<Update<T>> {
    linearized_update(prior, model, obs, prior.mean()).map(Update::one_shot)
}

/// Iterates `y ← mean(step(y))` until a step moves less than `ctl.tol`.
///
/// When rounding noise in `step` keeps the movement just above `tol`, the
/// iteration also stops once a step within `1000·tol` fails to shrink.
/// Returns the update computed at the last linearization point. The
/// reported iteration count is the number of steps that moved the
/// iterate, or 1 if the start was already a fixed point.
pub(crate) fn iterate_to_fixed_point<T, F>(start: T, ctl: &IterationControl<T>, mut step: F) -> Result<Update<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<(GaussianBelief<T>, Vec<UpdateWarning>)>,
{
    let noise_band = T::lit(1e3) * ctl.tol;
    let mut y = start;
    let mut moved = T::infinity();
    for pass in 1..=ctl.max_iter {
        let (belief, warnings) = step(y)?;
        let prev = moved;
        moved = (belief.mean() - y).abs();
        if ctl.settled(moved, y) || (moved < noise_band && moved >= prev) {
            return Ok(Update { belief, iterations: (pass - 1).max(1), warnings });
        }
        y = belief.mean();
    }
    Err(FilterError::NonConvergence {
        iterations: ctl.max_iter,
        last: y.to_f64().unwrap_or(f64::NAN),
        residual: moved.to_f64().unwrap_or(f64::NAN),
    })
}

pub fn iekf_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    ctl: &IterationControl<T>,
) -> Result<Update<T>> {
    let start = match ctl.start {
        IterationStart::PriorMean => prior.mean(),
        IterationStart::OneShot => linearized_update(prior, model, obs, prior.mean())?.mean(),
    };
    iterate_to_fixed_point(start, ctl, |y| Ok((linearized_update(prior, model, obs, y)?, Vec::new())))
}

/// Observation-centered update: linearize at `x_obs = h⁻¹(z_obs)`.
///
/// The mean is `x_obs − τ²/(h′²σ² + τ²)·(x_obs − μ)`, which equals `x_obs`
/// exactly when `τ = 0`.
pub fn ocekf_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
) -> Result<Update<T>> {
    let x_obs = model.inverse(obs.z_obs())?;
    let slope = model.derivative(x_obs)?;
    if slope == T::zero() || !slope.is_finite() {
        return Err(FilterError::Degenerate("measurement slope vanished at the observation"));
    }
    let var = prior.variance();
    let noise = obs.noise_variance();
    let denom = slope * slope * var + noise;
    if !(denom > T::zero()) {
        return Err(FilterError::Degenerate("zero prior variance and zero measurement noise"));
    }
    let mean = x_obs - noise / denom * (x_obs - prior.mean());
    GaussianBelief::new(mean, var * noise / denom).map(Update::one_shot)
}
