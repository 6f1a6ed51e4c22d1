//! Exact posterior moments by quadrature, used as ground truth for the
//! Gaussian filters.
//!
//! The unnormalized log posterior is evaluated on the union of two uniform
//! grids: one spanning the prior and one spanning the likelihood mapped to
//! the signal scale. With a sharp measurement the posterior can be four
//! orders of magnitude narrower than the prior, and a single uniform grid
//! would need ~10⁹ nodes to resolve both. Integration uses the composite
//! trapezoid rule on the merged nodes, with every sum reduced pairwise in
//! index order so results are bit-reproducible.

use crate::belief::{GaussianBelief, Measurement};
use crate::error::{FilterError, Result};
use crate::models::MeasurementModel;
use crate::scalar::{pairwise_sum, Scalar};

/// Minimum captured mass for a run to count as successful.
pub const MIN_MASS_CAPTURED: f64 = 0.999_999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    /// Half-width of each window in its own standard deviations.
    pub window_halfwidth_sigmas: T,
    /// Nodes per window on the first pass; odd, at least 3.
    pub nodes_per_window: usize,
    /// How many times the node count may be doubled.
    pub refinement_limit: usize,
}

impl<T: Scalar> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            window_halfwidth_sigmas: T::lit(8.0),
            nodes_per_window: 200_001,
            refinement_limit: 4,
        }
    }
}

impl<T: Scalar> QuadratureConfig<T> {
    fn validate(&self) -> Result<()> {
        if self.nodes_per_window < 3 || self.nodes_per_window.is_multiple_of(2) {
            return Err(FilterError::Domain(format!(
                "nodes_per_window must be odd and >= 3, got {}",
                self.nodes_per_window
            )));
        }
        if !(self.window_halfwidth_sigmas > T::zero()) {
            return Err(FilterError::Domain("window half-width must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSummary<T> {
    pub mean: T,
    pub sd: T,
    /// Estimated fraction of the posterior mass inside the grid.
    pub mass_captured: T,
    /// Distinct nodes on the final grid; 0 for the analytic branch.
    pub nodes_used: usize,
}

fn require_noise<T: Scalar>(prior: &GaussianBelief<T>, obs: &Measurement<T>) -> Result<()> {
    if !(obs.tau() > T::zero()) {
        return Err(FilterError::Domain("posterior density needs tau > 0".into()));
    }
    if !(prior.variance() > T::zero()) {
        return Err(FilterError::Domain("posterior density needs a prior variance > 0".into()));
    }
    Ok(())
}

/// `−(x−μ)²/(2σ²) − (z_obs − h(x))²/(2τ²)`.
pub fn log_posterior_unnorm<T: Scalar, M: MeasurementModel<T>>(
    x: T,
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
) -> Result<T> {
    require_noise(prior, obs)?;
    let prior_term = (x - prior.mean()) * (x - prior.mean()) / prior.variance();
    let resid = obs.z_obs() - model.value(x)?;
    Ok(-T::half() * (prior_term + resid * resid / obs.noise_variance()))
}

/// Log density on the grid; nodes outside the model's domain get `-inf`.
fn log_density<T: Scalar, M: MeasurementModel<T>>(
    x: T,
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
) -> Result<T> {
    match log_posterior_unnorm(x, prior, model, obs) {
        Ok(v) => Ok(v),
        Err(FilterError::Domain(_)) => Ok(T::neg_infinity()),
        Err(e) => Err(e),
    }
}

fn uniform<T: Scalar>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let last = T::from_usize(n - 1).unwrap();
    (0..n).map(move |i| {
        let t = T::from_usize(i).unwrap() / last;
        lo + (hi - lo) * t
    })
}

struct Grid<T> {
    nodes: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    fn two_window(windows: [(T, T); 2], n: usize) -> Self {
        let mut nodes: Vec<T> = windows.iter().flat_map(|&(lo, hi)| uniform(lo, hi, n)).collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup();
        Self { nodes }
    }
}

struct Quadrature<T> {
    summary: PosteriorSummary<T>,
    /// Natural log of the normalizer of the unnormalized density.
    log_norm: T,
}

/// Trapezoid integral of `f·w` over merged nodes, pairwise-reduced.
fn trapezoid<T: Scalar>(x: &[T], w: &[T], f: impl Fn(T) -> T) -> T {
    let parts: Vec<T> = (0..x.len() - 1)
        .map(|i| T::half() * (x[i + 1] - x[i]) * (w[i] * f(x[i]) + w[i + 1] * f(x[i + 1])))
        .collect();
    pairwise_sum(&parts)
}

fn integrate<T: Scalar, M: MeasurementModel<T>>(
    grid: &Grid<T>,
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
) -> Result<Quadrature<T>> {
    let x = &grid.nodes;
    let logs = x
        .iter()
        .map(|&xi| log_density(xi, prior, model, obs))
        .collect::<Result<Vec<T>>>()?;
    let (peak_idx, peak) = logs
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::neg_infinity()), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    if !peak.is_finite() {
        return Err(FilterError::Domain("posterior density vanishes on the whole grid".into()));
    }
    let w: Vec<T> = logs.iter().map(|&l| (l - peak).exp()).collect();
    // Moments about the mode keep the variance free of cancellation.
    let anchor = x[peak_idx];
    let z = trapezoid(x, &w, |_| T::one());
    let m1 = trapezoid(x, &w, |xi| xi - anchor) / z;
    let m2 = trapezoid(x, &w, |xi| (xi - anchor) * (xi - anchor)) / z;
    let var = (m2 - m1 * m1).max(T::zero());
    // Gaussian-tail bound on the mass beyond each end of the grid.
    let tail = (w[0] + w[w.len() - 1]) * prior.sd() / z;
    Ok(Quadrature {
        summary: PosteriorSummary {
            mean: anchor + m1,
            sd: var.sqrt(),
            mass_captured: (T::one() - tail).max(T::zero()),
            nodes_used: x.len(),
        },
        log_norm: peak + z.ln(),
    })
}

fn windows<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    halfwidth: T,
) -> Result<[(T, T); 2]> {
    let x_obs = model.inverse(obs.z_obs())?;
    let slope = model.derivative(x_obs)?.abs();
    if slope == T::zero() {
        return Err(FilterError::Degenerate("measurement slope vanished at the observation"));
    }
    let prior_half = halfwidth * prior.sd();
    let like_half = halfwidth * obs.tau() / slope;
    Ok([
        (prior.mean() - prior_half, prior.mean() + prior_half),
        (x_obs - like_half, x_obs + like_half),
    ])
}

fn refined<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<Quadrature<T>> {
    cfg.validate()?;
    require_noise(prior, obs)?;
    let wins = windows(prior, model, obs, cfg.window_halfwidth_sigmas)?;
    let mut n = cfg.nodes_per_window;
    let mut current = integrate(&Grid::two_window(wins, n), prior, model, obs)?;
    for _ in 0..cfg.refinement_limit {
        n = 2 * (n - 1) + 1;
        let next = integrate(&Grid::two_window(wins, n), prior, model, obs)?;
        let change = (next.summary.mean - current.summary.mean).abs();
        let scale = prior.sd().max(next.summary.sd);
        current = next;
        if change < T::lit(1e-6) * scale {
            break;
        }
    }
    if current.summary.mass_captured < T::lit(MIN_MASS_CAPTURED) {
        return Err(FilterError::MassLeak {
            captured: current.summary.mass_captured.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(current)
}

/// Posterior mean and standard deviation of `x` given `z_obs`.
///
/// With `τ = 0` the posterior is a point mass at `h⁻¹(z_obs)`, returned
/// analytically; a zero-variance prior is likewise returned unchanged.
/// Otherwise the node count is doubled until the mean moves by less than
/// `1e-6·max(σ, sd)` or the refinement budget runs out.
pub fn exact_posterior_moments<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    cfg: &QuadratureConfig<T>,
) -> Result<PosteriorSummary<T>> {
    if obs.tau() == T::zero() {
        return Ok(PosteriorSummary {
            mean: model.inverse(obs.z_obs())?,
            sd: T::zero(),
            mass_captured: T::one(),
            nodes_used: 0,
        });
    }
    if prior.variance() == T::zero() {
        return Ok(PosteriorSummary { mean: prior.mean(), sd: T::zero(), mass_captured: T::one(), nodes_used: 0 });
    }
    refined(prior, model, obs, cfg).map(|q| q.summary)
}

/// Normalized posterior density on `n` evenly spaced points of `[lo, hi]`.
///
/// The normalizer comes from the full two-window quadrature, so the
/// values are true densities even when `[lo, hi]` cuts off some mass.
pub fn posterior_density_grid<T: Scalar, M: MeasurementModel<T>>(
    prior: &GaussianBelief<T>,
    model: &M,
    obs: &Measurement<T>,
    lo: T,
    hi: T,
    n: usize,
) -> Result<Vec<(T, T)>> {
    if !(lo < hi) || n < 2 {
        return Err(FilterError::Domain(format!("density grid needs lo < hi and n >= 2, got [{lo}, {hi}], n={n}")));
    }
    let q = refined(prior, model, obs, &QuadratureConfig::default())?;
    uniform(lo, hi, n)
        .map(|x| Ok((x, (log_density(x, prior, model, obs)? - q.log_norm).exp())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Affine, Model};
    use approx::assert_relative_eq;

    fn prior(mean: f64, sd: f64) -> GaussianBelief<f64> {
        GaussianBelief::from_sd(mean, sd).unwrap()
    }

    fn obs(z: f64, tau: f64) -> Measurement<f64> {
        Measurement::new(z, tau).unwrap()
    }

    fn small() -> QuadratureConfig<f64> {
        QuadratureConfig { nodes_per_window: 20_001, ..Default::default() }
    }

    #[test]
    fn log_density_examples() {
        let id = Affine::<f64>::identity();
        assert_eq!(log_posterior_unnorm(1.0, &prior(0.0, 1.0), &id, &obs(2.0, 1.0)).unwrap(), -1.0);
        assert_eq!(log_posterior_unnorm(2.0, &prior(2.0, 1.0), &id, &obs(2.0, 1.0)).unwrap(), 0.0);
        assert!(log_posterior_unnorm(1.0, &prior(0.0, 1.0), &id, &obs(2.0, 0.0)).is_err());
    }

    #[test]
    fn conjugate_affine_matches_closed_form() {
        let m = Affine::new(2.0, -1.0).unwrap();
        let p = prior(0.5, 1.5);
        let o = obs(3.0, 0.8);
        let info = 1.0 / 2.25 + 4.0 / 0.64;
        let var = 1.0 / info;
        let mean = var * (0.5 / 2.25 + 2.0 * 4.0 / 0.64);
        let got = exact_posterior_moments(&p, &m, &o, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(got.mean, mean, max_relative = 1e-8);
        assert_relative_eq!(got.sd, var.sqrt(), max_relative = 1e-8);
        assert!(got.mass_captured >= MIN_MASS_CAPTURED);
    }

    #[test]
    fn perfect_measurement_is_analytic() {
        let m = Model::anomaly(0.7).unwrap();
        let got = exact_posterior_moments(&prior(260.0, 25.0), &m, &obs(225.5, 0.0), &small()).unwrap();
        assert_eq!(got.mean, m.inverse(225.5).unwrap());
        assert_eq!(got.sd, 0.0);
        assert_eq!(got.nodes_used, 0);
    }

    #[test]
    fn anomaly_example_one_c() {
        let m = Model::anomaly(0.7).unwrap();
        let got = exact_posterior_moments(&prior(260.0, 25.0), &m, &obs(225.5, 2.0), &small()).unwrap();
        assert!((got.mean - 309.0).abs() < 0.1, "{}", got.mean);
        assert!((got.sd - 2.8).abs() < 0.1, "{}", got.sd);
    }

    #[test]
    fn narrow_window_leaks_mass() {
        let m = Affine::<f64>::identity();
        let cfg = QuadratureConfig { window_halfwidth_sigmas: 1.0, nodes_per_window: 101, refinement_limit: 0 };
        let err = exact_posterior_moments(&prior(0.0, 1.0), &m, &obs(0.0, 1.0), &cfg).unwrap_err();
        assert!(matches!(err, FilterError::MassLeak { .. }));
    }

    #[test]
    fn config_validation() {
        let m = Affine::<f64>::identity();
        let cfg = QuadratureConfig { nodes_per_window: 100, ..Default::default() };
        assert!(exact_posterior_moments(&prior(0.0, 1.0), &m, &obs(0.0, 1.0), &cfg).is_err());
    }

    #[test]
    fn density_grid_conjugate() {
        let m = Affine::<f64>::identity();
        let p = prior(0.0, 1.0);
        let o = obs(2.0, 1.0);
        let grid = posterior_density_grid(&p, &m, &o, -5.0, 7.0, 1201).unwrap();
        let post = GaussianBelief::new(1.0, 0.5).unwrap();
        for &(x, d) in &grid {
            assert!((d - post.pdf(x)).abs() < 1e-9);
        }
        assert!(posterior_density_grid(&p, &m, &o, 1.0, 1.0, 10).is_err());
        assert!(posterior_density_grid(&p, &m, &o, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn density_peak_matches_fine_scan() {
        let m = Model::anomaly(0.7).unwrap();
        let p = prior(260.0, 25.0);
        let o = obs(225.5, 2.0);
        let grid = posterior_density_grid(&p, &m, &o, 295.0, 340.0, 4501).unwrap();
        let (peak_x, _) = grid.iter().copied().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let scan_x = (0..=200_000)
            .map(|i| 305.0 + i as f64 * 5e-5)
            .map(|x| (x, log_posterior_unnorm(x, &p, &m, &o).unwrap()))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
            .0;
        assert!((peak_x - scan_x).abs() <= 0.01, "{peak_x} vs {scan_x}");
        let mean = exact_posterior_moments(&p, &m, &o, &small()).unwrap().mean;
        assert!(scan_x > mean, "mode {scan_x} should sit above the mean {mean}");
    }

    #[test]
    fn out_of_domain_nodes_are_skipped() {
        let m = Model::power(2.0).unwrap();
        let got = exact_posterior_moments(&prior(1.0, 1.0), &m, &obs(2.0, 0.1), &small()).unwrap();
        assert!(got.mean > 1.0 && got.mean < 2.0);
    }
}
