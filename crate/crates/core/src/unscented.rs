//! Three-point unscented updates: UKF, IUKF and OCUKF.
//!
//! Sigma points `y − ασ, y, y + ασ` replace the derivative of `h` by
//! differences. As `α → 0` each filter tends to its extended counterpart.

use crate::belief::{clamped, GaussianBelief, IterationControl, IterationStart, Measurement, Update};
use crate::error::{FilterError, Result};
use crate::extended::iterate_to_fixed_point;
use crate::models::MeasurementModel;
use crate::scalar::{sum_ascending, Scalar};

/// Conventional spread parameter.
pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Sigma points and weights, ordered `j = -1, 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSet<T> {
    center: T,
    offsets: [T; 3],
    alpha: T,
    mean_weights: [T; 3],
    cov_weights: [T; 3],
}

impl<T: Scalar> SigmaSet<T> {
    pub fn center(&self) -> T {
        self.center
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn points(&self) -> [T; 3] {
        self.offsets.map(|d| self.center + d)
    }

    /// `x_j − y`, kept separately so no cancellation is introduced.
    pub fn offsets(&self) -> [T; 3] {
        self.offsets
    }

    pub fn mean_weights(&self) -> [T; 3] {
        self.mean_weights
    }

    pub fn cov_weights(&self) -> [T; 3] {
        self.cov_weights
    }
}

/// Builds the sigma set about `y` with spread `sigma`.
///
/// `α` must lie in `(0, √3]`, where the central covariance weight is at
/// least the central mean weight.
pub fn make_sigma_set<T: Scalar>(y: T, sigma: T, alpha: T) -> Result<SigmaSet<T>> {
    if !(alpha > T::zero()) || alpha > T::lit(3.0).sqrt() {
        return Err(FilterError::BadTuning(format!("alpha must lie in (0, sqrt 3], got {alpha}")));
    }
    if !(sigma >= T::zero()) || !sigma.is_finite() || !y.is_finite() {
        return Err(FilterError::Domain(format!("sigma set needs finite y and sigma >= 0, got y={y}, sigma={sigma}")));
    }
    let a2 = alpha * alpha;
    let outer = (T::two() * a2).recip();
    let mean_center = T::one() - a2.recip();
    let cov_center = mean_center + T::lit(3.0) - a2;
    let spread = alpha * sigma;
    Ok(SigmaSet {
        center: y,
        offsets: [-spread, T::zero(), spread],
        alpha,
        mean_weights: [outer, mean_center, outer],
        cov_weights: [outer, cov_center, outer],
    })
}

/// Transformed sigma-point statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnscentedStats<T> {
    /// `h` at the center point.
    pub h_center: T,
    /// Weighted mean `z̄` of the transformed points.
    pub z_bar: T,
    /// `z̄ − h(y)`, as accumulated rather than as a difference.
    pub bias: T,
    /// Weighted signal/measurement covariance `C`.
    pub cross_cov: T,
    /// Weighted measurement-scale variance `V`.
    pub meas_var: T,
}

/// Pushes the sigma points through `h`.
///
/// `z̄` is accumulated as `h(y) + Σ w^a_j (z_j − h(y))` and `C` as
/// `Σ w^c_j (z_j − z̄)(x_j − y)`. `V = Σ w^c_j (z_j − h(y))²` measures the
/// spread about the transformed center, so that `V → h′(y)²σ²` as `α → 0`;
/// the spread about `z̄` would keep an extra `σ⁴h″(y)²/2` term in the
/// limit. Each sum adds its terms smallest first since the weights reach
/// `1/(2α²)`.
pub fn unscented_stats<T: Scalar, M: MeasurementModel<T>>(set: &SigmaSet<T>, model: &M) -> Result<UnscentedStats<T>> {
    let h_center = model.value(set.center)?;
    let mut dev = [T::zero(); 3];
    for j in [0, 2] {
        dev[j] = model.increment(set.center, set.offsets[j])?;
    }
    let bias = sum_ascending((0..3).map(|j| set.mean_weights[j] * dev[j]).collect());
    let z_bar = h_center + bias;
    let cross_cov = sum_ascending((0..3).map(|j| set.cov_weights[j] * (dev[j] - bias) * set.offsets[j]).collect());
    let meas_var = sum_ascending((0..3).map(|j| set.cov_weights[j] * dev[j] * dev[j]).collect());
    Ok(UnscentedStats { h_center, z_bar, bias, cross_cov, meas_var })
}

/// Unscented update with sigma points centered at `y`.
///
/// `mean = μ + C/(V+τ²)·(z_obs − c) + V/(V+τ²)·(y − μ)` with `c = z̄` when
/// `bias_correct` is set and `c = h(y)` otherwise;
/// `variance = σ² − C²/(V+τ²)`, evaluated as
/// `σ²(τ² + α²(z̄ − h(y))²)/(V+τ²)`, which is the same quantity for the
/// symmetric three-point set but free of cancellation.
pub fn unscented_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    y: T,
    alpha: T,
    bias_correct: bool,
) -> Result<Update<T>> {
    let set = make_sigma_set(y, prior.sd(), alpha)?;
    let stats = unscented_stats(&set, model)?;
    if stats.cross_cov == T::zero() || !stats.cross_cov.is_finite() {
        return Err(FilterError::Degenerate("sigma points carry no signal/measurement covariance"));
    }
    let denom = stats.meas_var + obs.noise_variance();
    if !(denom > T::zero()) {
        return Err(FilterError::Degenerate("zero transformed variance and zero measurement noise"));
    }
    let predicted = if bias_correct { stats.z_bar } else { stats.h_center };
    let mean = prior.mean()
        + stats.cross_cov / denom * (obs.z_obs() - predicted)
        + stats.meas_var / denom * (y - prior.mean());
    let spread = alpha * stats.bias;
    let variance = prior.variance() * (obs.noise_variance() + spread * spread) / denom;
    let mut warnings = Vec::new();
    let belief = clamped(mean, variance, &mut warnings)?;
    Ok(Update { belief, iterations: 1, warnings })
}

/// Standard UKF: centered at the prior mean, innovation taken against `z̄`.
pub fn ukf_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    alpha: T,
) -> Result<Update<T>> {
    unscented_update(prior, model, obs, prior.mean(), alpha, true)
}

/// Iterated UKF: re-centers the sigma points on the current posterior mean
/// (spread always from the prior σ) until the mean stops moving.
pub fn iukf_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    alpha: T,
    ctl: &IterationControl<T>,
) -> Result<Update<T>> {
    let start = match ctl.start {
        IterationStart::PriorMean => prior.mean(),
        IterationStart::OneShot => unscented_update(prior, model, obs, prior.mean(), alpha, false)?.mean(),
    };
    iterate_to_fixed_point(start, ctl, |y| {
        let up = unscented_update(prior, model, obs, y, alpha, false)?;
        Ok((up.belief, up.warnings))
    })
}

/// Observation-centered UKF: sigma points about `h⁻¹(z_obs)`.
pub fn ocukf_update<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    alpha: T,
) -> Result<Update<T>> {
    let x_obs = model.inverse(obs.z_obs())?;
    unscented_update(prior, model, obs, x_obs, alpha, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::{iekf_update, linearized_update};
    use crate::models::{Affine, Model, PowerLaw};
    use approx::assert_relative_eq;

    fn prior(mean: f64, sd: f64) -> GaussianBelief<f64> {
        GaussianBelief::from_sd(mean, sd).unwrap()
    }

    fn obs(z: f64, tau: f64) -> Measurement<f64> {
        Measurement::new(z, tau).unwrap()
    }

    #[test]
    fn sigma_set_layout() {
        let s = make_sigma_set(0.0, 1.0, 1e-3).unwrap();
        assert_eq!(s.points(), [-1e-3, 0.0, 1e-3]);
        assert_relative_eq!(s.mean_weights()[0], 5e5, max_relative = 1e-15);
        assert_relative_eq!(s.mean_weights()[2], 5e5, max_relative = 1e-15);
        let s = make_sigma_set(5.0, 0.0, 1e-3).unwrap();
        assert_eq!(s.points(), [5.0; 3]);
    }

    #[test]
    fn sigma_set_moments() {
        for &alpha in &[1e-2, 1e-3, 1e-4, 0.5, 1.0] {
            let s = make_sigma_set(3.0, 2.0, alpha).unwrap();
            let wa = s.mean_weights();
            let wc = s.cov_weights();
            let x = s.points();
            let d = s.offsets();
            let sum_wa: f64 = wa.iter().sum();
            assert_relative_eq!(sum_wa, 1.0, max_relative = 1e-12);
            let mean = wa[0] * d[0] + wa[1] * d[1] + wa[2] * d[2];
            assert!(mean.abs() < 1e-12);
            let weighted: f64 = (0..3).map(|j| wa[j] * x[j]).sum();
            assert_relative_eq!(weighted, 3.0, max_relative = 1e-9);
            let var: f64 = (0..3).map(|j| wc[j] * d[j] * d[j]).sum();
            assert_relative_eq!(var, 4.0, max_relative = 1e-12);
            assert_relative_eq!(wc[1] - wa[1], 3.0 - alpha * alpha, max_relative = 1e-6);
        }
    }

    #[test]
    fn sigma_set_rejects_bad_alpha() {
        assert!(matches!(make_sigma_set(0.0, 1.0, 0.0), Err(FilterError::BadTuning(_))));
        assert!(matches!(make_sigma_set(0.0, 1.0, -1e-3), Err(FilterError::BadTuning(_))));
        assert!(matches!(make_sigma_set(0.0, 1.0, 2.0), Err(FilterError::BadTuning(_))));
        assert!(matches!(make_sigma_set(0.0, 1.0, f64::NAN), Err(FilterError::BadTuning(_))));
        assert!(make_sigma_set(0.0, -1.0, 1e-3).is_err());
    }

    #[test]
    fn quadratic_statistics_are_exact() {
        let sq = PowerLaw::new(2.0).unwrap();
        for &alpha in &[1e-2, 1e-3, 0.3, 0.9] {
            let st = unscented_stats(&make_sigma_set(1.0, 1.0, alpha).unwrap(), &sq).unwrap();
            assert_relative_eq!(st.z_bar, 2.0, max_relative = 1e-9);
            assert_relative_eq!(st.cross_cov, 2.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn affine_statistics_are_exact() {
        let m = Affine::new(-1.5, 4.0).unwrap();
        for &alpha in &[1e-3, 0.5, 1.7] {
            let st = unscented_stats(&make_sigma_set(2.0, 3.0, alpha).unwrap(), &m).unwrap();
            assert_relative_eq!(st.z_bar, 1.0, max_relative = 1e-9);
            assert_relative_eq!(st.cross_cov, -13.5, max_relative = 1e-9);
            assert_relative_eq!(st.meas_var, 20.25, max_relative = 1e-9);
        }
    }

    #[test]
    fn small_alpha_approaches_linearization() {
        let m = Model::anomaly(0.7).unwrap();
        let p = prior(260.0, 25.0);
        let o = obs(225.5, 2.0);
        for &y in &[260.0, 300.0, 310.0] {
            let lin = linearized_update(&p, &m, &o, y).unwrap();
            let uns = unscented_update(&p, &m, &o, y, 1e-4, false).unwrap();
            assert!((lin.mean() - uns.mean()).abs() < 1e-5);
            assert!((lin.variance() - uns.belief.variance()).abs() < 1e-4);
        }
    }

    #[test]
    fn ukf_anomaly_example() {
        let m = Model::anomaly(0.7).unwrap();
        let out = ukf_update(&prior(260.0, 25.0), &m, &obs(225.5, 2.0), 1e-3).unwrap();
        assert!((out.mean() - 323.5).abs() < 0.05, "{}", out.mean());
        assert!((out.sd() - 5.8).abs() < 0.1);
    }

    #[test]
    fn iterated_and_centered_examples() {
        let m = Model::anomaly(0.7).unwrap();
        let ctl = IterationControl::default();
        let it = iukf_update(&prior(35.0, 15.0), &m, &obs(143.6, 2.0), 1e-3, &ctl).unwrap();
        assert!((it.mean() - 63.2).abs() < 0.05 && (it.sd() - 3.5).abs() < 0.15);
        let it = iukf_update(&prior(260.0, 25.0), &m, &obs(225.5, 0.0), 1e-3, &ctl).unwrap();
        assert!((it.mean() - 310.0).abs() < 0.05);
        assert!(it.sd() > 7e-3 / 2.0 && it.sd() < 7e-3 * 2.0, "{}", it.sd());
        let oc = ocukf_update(&prior(35.0, 15.0), &m, &obs(143.6, 0.0), 1e-3).unwrap();
        assert_eq!(oc.mean(), m.inverse(143.6).unwrap());
        assert!(oc.sd() > 1e-3 && oc.sd() < 4e-3);

        let p = prior(260.0, 25.0);
        let o = obs(225.5, 2.0);
        let iekf = iekf_update(&p, &m, &o, &ctl).unwrap();
        let iukf = iukf_update(&p, &m, &o, 1e-4, &ctl).unwrap();
        assert!((iukf.mean() - iekf.mean()).abs() < 1e-6);
    }

    #[test]
    fn iukf_one_shot_start_matches() {
        let m = Model::anomaly(0.7).unwrap();
        let p = prior(35.0, 15.0);
        let o = obs(143.6, 2.0);
        let a = iukf_update(&p, &m, &o, 1e-3, &IterationControl::default()).unwrap();
        let b = iukf_update(&p, &m, &o, 1e-3, &IterationControl::default().with_start(IterationStart::OneShot)).unwrap();
        assert!((a.mean() - b.mean()).abs() < 1e-10);
    }

    #[test]
    fn perfect_measurement_on_affine_model_leaves_no_variance() {
        let m = Affine::new(2.0, 0.0).unwrap();
        let out = ukf_update(&prior(1.0, 1.0), &m, &obs(4.0, 0.0), 1e-3).unwrap();
        assert_eq!(out.belief.variance(), 0.0);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn variance_is_nonnegative_at_zero_noise() {
        let m = Model::anomaly(0.7).unwrap();
        for (mu, z) in [(260.0, 225.5), (35.0, 143.6)] {
            let out = iukf_update(&prior(mu, 20.0), &m, &obs(z, 0.0), 1e-3, &IterationControl::default()).unwrap();
            assert!(out.belief.variance() > 0.0);
            assert!(out.warnings.is_empty());
        }
    }

    #[test]
    fn degenerate_prior() {
        let m = Affine::<f64>::identity();
        let err = ukf_update(&prior(1.0, 0.0), &m, &obs(2.0, 0.0), 1e-3).unwrap_err();
        assert!(matches!(err, FilterError::Degenerate(_)));
    }
}
