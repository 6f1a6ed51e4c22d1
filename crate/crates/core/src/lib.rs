//! Scalar nonlinear Kalman filter updates.
//!
//! Six Gaussian measurement updates for a one-dimensional state observed
//! through a monotone map `h`:
//!
//! | linearization point  | extended        | unscented       |
//! |----------------------|-----------------|-----------------|
//! | prior mean           | [`ekf_update`]  | [`ukf_update`]  |
//! | posterior mean       | [`iekf_update`] | [`iukf_update`] |
//! | `h⁻¹(z_obs)`         | [`ocekf_update`]| [`ocukf_update`]|
//!
//! plus the Keplerian mean-to-true anomaly map used as a strongly nonlinear
//! `h`, and a quadrature routine for the exact posterior moments.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod belief;
pub mod classic;
pub mod error;
pub mod extended;
pub mod kepler;
pub mod models;
pub mod posterior;
pub mod scalar;
pub mod unscented;

pub use belief::{propagate, IterationControl, IterationStart, Update, UpdateWarning};
pub use error::{FilterError, Result};
pub use extended::{ekf_update, iekf_update, linearized_update, ocekf_update};
pub use models::MeasurementModel;
pub use posterior::{exact_posterior_moments, log_posterior_unnorm, posterior_density_grid};
pub use scalar::Scalar;
pub use unscented::{iukf_update, make_sigma_set, ocukf_update, ukf_update, unscented_stats, unscented_update, DEFAULT_ALPHA};

pub type GaussianBelief = belief::GaussianBelief<f64>;
pub type Measurement = belief::Measurement<f64>;
pub type LinearDynamics = belief::LinearDynamics<f64>;
pub type Eccentricity = kepler::Eccentricity<f64>;
pub type Model = models::Model<f64>;
pub type PowerLaw = models::PowerLaw<f64>;
pub type AnomalyMap = models::AnomalyMap<f64>;
pub type Affine = models::Affine<f64>;
pub type SigmaSet = unscented::SigmaSet<f64>;
pub type UnscentedStats = unscented::UnscentedStats<f64>;
pub type QuadratureConfig = posterior::QuadratureConfig<f64>;
pub type PosteriorSummary = posterior::PosteriorSummary<f64>;
