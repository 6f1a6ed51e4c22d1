//! Conversions between mean (M), eccentric (E) and true (T) anomaly.
//!
//! All public angles are in degrees and may lie anywhere on the real line.
//! Each conversion reduces its input to the base window `[-180°, 180°)`
//! using `k = floor((angle + 180°) / 360°)`, converts in radians, and adds
//! `360°·k` back, so the maps are periodic extensions of the base-window
//! bijections and agree at every multiple of 180°.

use crate::error::{FilterError, Result};
use crate::scalar::Scalar;

/// Default Newton iteration budget for Kepler's equation.
pub const KEPLER_MAX_ITER: usize = 60;

/// Orbital eccentricity, `0 <= e < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Eccentricity<T>(T);

impl<T: Scalar> Eccentricity<T> {
    pub fn new(e: T) -> Result<Self> {
        if e >= T::zero() && e < T::one() {
            Ok(Self(e))
        } else {
            Err(FilterError::Domain(format!(
                "eccentricity must satisfy 0 <= e < 1, got {e}"
            )))
        }
    }

    pub fn circular() -> Self {
        Self(T::zero())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

/// Default Kepler tolerance in degrees: 1e-13 rad, widened for
/// low-precision scalars.
pub fn kepler_tol_deg<T: Scalar>() -> T {
    let rad = T::lit(1e-13).max(T::lit(64.0) * T::epsilon());
    rad.to_degrees()
}

fn full_turn<T: Scalar>() -> T {
    T::lit(360.0)
}

fn half_turn<T: Scalar>() -> T {
    T::lit(180.0)
}

/// Splits an angle into its base-window remainder and the `360°·k` shift.
#[inline]
fn reduce<T: Scalar>(deg: T) -> (T, T) {
    let k = ((deg + half_turn()) / full_turn()).floor();
    let shift = k * full_turn();
    (deg - shift, shift)
}

fn ensure_finite<T: Scalar>(deg: T, what: &str) -> Result<()> {
    if deg.is_finite() {
        Ok(())
    } else {
        Err(FilterError::Domain(format!("{what} must be finite, got {deg}")))
    }
}

/// Newton iteration on `f(E) = E - e sin E - M` for a reduced mean anomaly
/// in radians, kept inside the bracket `[M - e, M + e]` by bisection.
fn solve_reduced<T: Scalar>(m: T, e: T, tol_rad: T, max_iter: usize) -> Result<T> {
    let kepler = |x: T| x - e * x.sin() - m;
    let mut lo = m - e;
    let mut hi = m + e;
    let mut x = if e > T::lit(0.8) && m.abs() < T::lit(30.0).to_radians() && m != T::zero() {
        T::PI().copysign(m)
    } else {
        m
    };
    let mut last_step = T::infinity();
    for _ in 0..max_iter {
        let f = kepler(x);
        if f == T::zero() {
            return Ok(x);
        }
        if f < T::zero() {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let slope = T::one() - e * x.cos();
        let mut next = x - f / slope;
        if !(next >= lo && next <= hi) {
            next = T::half() * (lo + hi);
        }
        last_step = (next - x).abs();
        x = next;
        if last_step <= tol_rad {
            break;
        }
    }
    let residual = kepler(x).abs();
    if last_step <= tol_rad && residual < tol_rad {
        Ok(x)
    } else {
        Err(FilterError::NonConvergence {
            iterations: max_iter,
            last: x.to_degrees().to_f64().unwrap_or(f64::NAN),
            residual: residual.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Solves Kepler's equation `M = E - e sin E` for the eccentric anomaly.
///
/// `tol_deg` bounds both the final Newton step and the equation residual.
/// The result lies in the same 360° window as `mean_deg`.
pub fn solve_eccentric_from_mean<T: Scalar>(
    mean_deg: T,
    e: Eccentricity<T>,
    tol_deg: T,
    max_iter: usize,
) -> Result<T> {
    ensure_finite(mean_deg, "mean anomaly")?;
    if !(tol_deg > T::zero()) || max_iter == 0 {
        return Err(FilterError::Domain(
            "kepler solver needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    let (m, shift) = reduce(mean_deg);
    let ecc = solve_reduced(m.to_radians(), e.value(), tol_deg.to_radians(), max_iter)?;
    Ok(ecc.to_degrees() + shift)
}

/// [`solve_eccentric_from_mean`] with the default tolerance and budget.
pub fn eccentric_from_mean<T: Scalar>(mean_deg: T, e: Eccentricity<T>) -> Result<T> {
    solve_eccentric_from_mean(mean_deg, e, kepler_tol_deg(), KEPLER_MAX_ITER)
}

pub fn eccentric_to_mean<T: Scalar>(ecc_deg: T, e: Eccentricity<T>) -> T {
    let (x, shift) = reduce(ecc_deg);
    let r = x.to_radians();
    (r - e.value() * r.sin()).to_degrees() + shift
}

// tan(T/2) = sqrt((1+e)/(1-e)) tan(E/2), as a two-argument arctangent so
// the half-angle near ±90° needs no division. Radians, base window.
fn ecc_to_true_rad<T: Scalar>(ecc: T, e: T) -> T {
    let half = T::half() * ecc;
    T::two() * ((T::one() + e).sqrt() * half.sin()).atan2((T::one() - e).sqrt() * half.cos())
}

fn true_to_ecc_rad<T: Scalar>(tru: T, e: T) -> T {
    let half = T::half() * tru;
    T::two() * ((T::one() - e).sqrt() * half.sin()).atan2((T::one() + e).sqrt() * half.cos())
}

pub fn eccentric_to_true<T: Scalar>(ecc_deg: T, e: Eccentricity<T>) -> T {
    let (x, shift) = reduce(ecc_deg);
    ecc_to_true_rad(x.to_radians(), e.value()).to_degrees() + shift
}

pub fn true_to_eccentric<T: Scalar>(true_deg: T, e: Eccentricity<T>) -> T {
    let (x, shift) = reduce(true_deg);
    true_to_ecc_rad(x.to_radians(), e.value()).to_degrees() + shift
}

/// Mean-to-true anomaly map. Strictly increasing, odd, and commutes with
/// whole-turn shifts. The identity, bit for bit, when `e = 0`.
pub fn mean_to_true<T: Scalar>(mean_deg: T, e: Eccentricity<T>) -> Result<T> {
    ensure_finite(mean_deg, "mean anomaly")?;
    if e.value() == T::zero() {
        return Ok(mean_deg);
    }
    let (m, shift) = reduce(mean_deg);
    let tol = kepler_tol_deg::<T>().to_radians();
    let ecc = solve_reduced(m.to_radians(), e.value(), tol, KEPLER_MAX_ITER)?;
    Ok(ecc_to_true_rad(ecc, e.value()).to_degrees() + shift)
}

/// Inverse of [`mean_to_true`]; closed form, no iteration.
pub fn true_to_mean<T: Scalar>(true_deg: T, e: Eccentricity<T>) -> T {
    if e.value() == T::zero() {
        return true_deg;
    }
    let (t, shift) = reduce(true_deg);
    let ecc = true_to_ecc_rad(t.to_radians(), e.value());
    (ecc - e.value() * ecc.sin()).to_degrees() + shift
}

/// `dT/dM = sqrt(1 - e^2) / (1 - e cos E)^2`, always positive.
pub fn dtrue_dmean<T: Scalar>(mean_deg: T, e: Eccentricity<T>) -> Result<T> {
    let ecc = eccentric_from_mean(mean_deg, e)?.to_radians();
    let e = e.value();
    let denom = T::one() - e * ecc.cos();
    Ok((T::one() - e * e).sqrt() / (denom * denom))
}

/// Finite-difference step for [`d2true_dmean2`], in degrees.
fn second_derivative_step<T: Scalar>(at: T) -> T {
    let base = T::lit(1e-4);
    if T::epsilon() <= T::lit(1e-15) {
        base
    } else {
        base.max(T::epsilon().cbrt() * at.abs().max(T::one()))
    }
}

/// Second derivative of the mean-to-true map (per degree), by a central
/// difference of [`dtrue_dmean`].
pub fn d2true_dmean2<T: Scalar>(mean_deg: T, e: Eccentricity<T>) -> Result<T> {
    if e.value() == T::zero() {
        return Ok(T::zero());
    }
    let step = second_derivative_step(mean_deg);
    let up = dtrue_dmean(mean_deg + step, e)?;
    let down = dtrue_dmean(mean_deg - step, e)?;
    Ok((up - down) / (T::two() * step))
}
