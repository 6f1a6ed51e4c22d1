use crate::error::{FilterError, Result};
use crate::scalar::Scalar;

/// Scalar Gaussian belief `N(mean, variance)` on the signal scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBelief<T> {
    mean: T,
    variance: T,
}

impl<T: Scalar> GaussianBelief<T> {
    pub fn new(mean: T, variance: T) -> Result<Self> {
        if !mean.is_finite() {
            return Err(FilterError::Domain(format!("belief mean must be finite, got {mean}")));
        }
        if !(variance >= T::zero()) || !variance.is_finite() {
            return Err(FilterError::Domain(format!("belief variance must be finite and >= 0, got {variance}")));
        }
        Ok(Self { mean, variance })
    }

    pub fn from_sd(mean: T, sd: T) -> Result<Self> {
        if !(sd >= T::zero()) {
            return Err(FilterError::Domain(format!("standard deviation must be >= 0, got {sd}")));
        }
        Self::new(mean, sd * sd)
    }

    #[inline]
    pub fn mean(&self) -> T {
        self.mean
    }

    #[inline]
    pub fn variance(&self) -> T {
        self.variance
    }

    #[inline]
    pub fn sd(&self) -> T {
        self.variance.sqrt()
    }

    /// Density of the belief at `x`. Zero-variance beliefs have no density.
    pub fn pdf(&self, x: T) -> T {
        let sd = self.sd();
        if sd == T::zero() {
            return T::zero();
        }
        let u = (x - self.mean) / sd;
        (-T::half() * u * u).exp() / (sd * (T::two() * T::PI()).sqrt())
    }
}

/// An observation `z_obs` with measurement-noise standard deviation `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement<T> {
    z_obs: T,
    tau: T,
}

impl<T: Scalar> Measurement<T> {
    /// `tau = 0` is allowed and means a perfect measurement.
    pub fn new(z_obs: T, tau: T) -> Result<Self> {
        if !z_obs.is_finite() {
            return Err(FilterError::Domain(format!("observation must be finite, got {z_obs}")));
        }
        if !(tau >= T::zero()) || !tau.is_finite() {
            return Err(FilterError::Domain(format!("tau must be finite and >= 0, got {tau}")));
        }
        Ok(Self { z_obs, tau })
    }

    #[inline]
    pub fn z_obs(&self) -> T {
        self.z_obs
    }

    #[inline]
    pub fn tau(&self) -> T {
        self.tau
    }

    #[inline]
    pub fn noise_variance(&self) -> T {
        self.tau * self.tau
    }
}

/// Scalar linear propagation `x' = F x + w`, `w ~ N(0, Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDynamics<T> {
    transition: T,
    process_noise: T,
}

impl<T: Scalar> LinearDynamics<T> {
    pub fn new(transition: T, process_noise: T) -> Result<Self> {
        if !transition.is_finite() || !(process_noise >= T::zero()) || !process_noise.is_finite() {
            return Err(FilterError::Domain(format!(
                "dynamics need finite F and Q >= 0, got F={transition}, Q={process_noise}"
            )));
        }
        Ok(Self { transition, process_noise })
    }

    pub fn transition(&self) -> T {
        self.transition
    }

    pub fn process_noise(&self) -> T {
        self.process_noise
    }
}

pub fn propagate<T: Scalar>(b: &GaussianBelief<T>, d: &LinearDynamics<T>) -> GaussianBelief<T> {
    let f = d.transition;
    GaussianBelief {
        mean: f * b.mean,
        variance: f * f * b.variance + d.process_noise,
    }
}

/// Where an iterated update takes its first linearization point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterationStart {
    #[default]
    PriorMean,
    /// Start from the one-shot (non-iterated) update's mean.
    OneShot,
}

/// Stopping rule for the iterated updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationControl<T> {
    pub tol: T,
    pub max_iter: usize,
    pub start: IterationStart,
}

impl<T: Scalar> IterationControl<T> {
    pub fn new(tol: T, max_iter: usize) -> Result<Self> {
        if !(tol > T::zero()) || max_iter == 0 {
            return Err(FilterError::Domain(format!(
                "iteration control needs tol > 0 and max_iter >= 1, got tol={tol}, max_iter={max_iter}"
            )));
        }
        Ok(Self { tol, max_iter, start: IterationStart::PriorMean })
    }

    pub fn with_start(mut self, start: IterationStart) -> Self {
        self.start = start;
        self
    }

    /// True once a fixed-point step is below `tol`, or within a few ulps
    /// of the iterate when `tol` is finer than the scalar can resolve.
    pub(crate) fn settled(&self, step: T, at: T) -> bool {
        step < self.tol || step <= T::lit(4.0) * T::epsilon() * at.abs()
    }
}

impl<T: Scalar> Default for IterationControl<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-12).max(T::lit(16.0) * T::epsilon()),
            max_iter: 100,
            start: IterationStart::PriorMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateWarning {
    /// The posterior variance came out negative by rounding and was set to
    /// zero. Holds the raw value.
    VarianceClamped(f64),
}

impl std::fmt::Display for UpdateWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::VarianceClamped(raw) => write!(f, "variance clamped to 0 (raw {raw:e})"),
        }
    }
}

/// Result of a measurement update.
#[derive(Debug, Clone, PartialEq)]
pub struct Update<T> {
    pub belief: GaussianBelief<T>,
    /// Linearization passes used; 1 for the one-shot filters.
    pub iterations: usize,
    pub warnings: Vec<UpdateWarning>,
}

impl<T: Scalar> Update<T> {
    pub(crate) fn one_shot(belief: GaussianBelief<T>) -> Self {
        Self { belief, iterations: 1, warnings: Vec::new() }
    }

    pub fn mean(&self) -> T {
        self.belief.mean()
    }

    pub fn sd(&self) -> T {
        self.belief.sd()
    }
}

/// Builds a posterior belief, clamping a slightly negative variance to zero.
pub(crate) fn clamped<T: Scalar>(mean: T, variance: T, warnings: &mut Vec<UpdateWarning>) -> Result<GaussianBelief<T>> {
    if variance < T::zero() {
        warnings.push(UpdateWarning::VarianceClamped(variance.to_f64().unwrap_or(f64::NAN)));
        GaussianBelief::new(mean, T::zero())
    } else {
        GaussianBelief::new(mean, variance)
    }
}
