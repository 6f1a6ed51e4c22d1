//! Monotone measurement maps `h` from the signal scale to the measurement
//! scale.

use crate::error::{FilterError, Result};
use crate::kepler::{self, Eccentricity};
use crate::scalar::Scalar;

/// A strictly monotone, twice differentiable measurement map.
pub trait MeasurementModel<T: Scalar> {
    fn value(&self, x: T) -> Result<T>;
    fn inverse(&self, z: T) -> Result<T>;
    fn derivative(&self, x: T) -> Result<T>;
    fn second_derivative(&self, x: T) -> Result<T>;

    /// `h(x + dx) − h(x)`. Models that can form the difference without
    /// cancellation should override this.
    fn increment(&self, x: T, dx: T) -> Result<T> {
        Ok(self.value(x + dx)? - self.value(x)?)
    }
}

impl<T: Scalar, M: MeasurementModel<T> + ?Sized> MeasurementModel<T> for &M {
    fn value(&self, x: T) -> Result<T> {
        (**self).value(x)
    }
    fn inverse(&self, z: T) -> Result<T> {
        (**self).inverse(z)
    }
    fn derivative(&self, x: T) -> Result<T> {
        (**self).derivative(x)
    }
    fn second_derivative(&self, x: T) -> Result<T> {
        (**self).second_derivative(x)
    }
    fn increment(&self, x: T, dx: T) -> Result<T> {
        (**self).increment(x, dx)
    }
}

/// `h(x) = x^λ` on `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw<T> {
    lambda: T,
}

impl<T: Scalar> PowerLaw<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if lambda > T::zero() && lambda.is_finite() {
            Ok(Self { lambda })
        } else {
            Err(FilterError::Domain(format!("power-law exponent must be > 0, got {lambda}")))
        }
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    fn check(&self, v: T, what: &str) -> Result<()> {
        if v > T::zero() && v.is_finite() {
            Ok(())
        } else {
            Err(FilterError::Domain(format!("power law needs {what} > 0, got {v}")))
        }
    }
}

impl<T: Scalar> MeasurementModel<T> for PowerLaw<T> {
    fn value(&self, x: T) -> Result<T> {
        self.check(x, "x")?;
        Ok(x.powf(self.lambda))
    }

    fn inverse(&self, z: T) -> Result<T> {
        self.check(z, "z")?;
        Ok(z.powf(self.lambda.recip()))
    }

    fn derivative(&self, x: T) -> Result<T> {
        self.check(x, "x")?;
        Ok(self.lambda * x.powf(self.lambda - T::one()))
    }

    fn second_derivative(&self, x: T) -> Result<T> {
        self.check(x, "x")?;
        let l = self.lambda;
        Ok(l * (l - T::one()) * x.powf(l - T::two()))
    }
}

/// Mean anomaly to true anomaly, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalyMap<T> {
    e: Eccentricity<T>,
}

impl<T: Scalar> AnomalyMap<T> {
    pub fn new(e: Eccentricity<T>) -> Self {
        Self { e }
    }

    pub fn eccentricity(&self) -> Eccentricity<T> {
        self.e
    }
}

impl<T: Scalar> MeasurementModel<T> for AnomalyMap<T> {
    fn value(&self, x: T) -> Result<T> {
        kepler::mean_to_true(x, self.e)
    }

    fn inverse(&self, z: T) -> Result<T> {
        if !z.is_finite() {
            return Err(FilterError::Domain(format!("true anomaly must be finite, got {z}")));
        }
        Ok(kepler::true_to_mean(z, self.e))
    }

    fn derivative(&self, x: T) -> Result<T> {
        kepler::dtrue_dmean(x, self.e)
    }

    fn second_derivative(&self, x: T) -> Result<T> {
        kepler::d2true_dmean2(x, self.e)
    }
}

/// `h(x) = a x + b`, `a != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine<T> {
    slope: T,
    offset: T,
}

impl<T: Scalar> Affine<T> {
    pub fn new(slope: T, offset: T) -> Result<Self> {
        if slope != T::zero() && slope.is_finite() && offset.is_finite() {
            Ok(Self { slope, offset })
        } else {
            Err(FilterError::Domain(format!("affine model needs finite a != 0, got a={slope}, b={offset}")))
        }
    }

    pub fn identity() -> Self {
        Self { slope: T::one(), offset: T::zero() }
    }

    pub fn slope(&self) -> T {
        self.slope
    }

    pub fn offset(&self) -> T {
        self.offset
    }
}

impl<T: Scalar> MeasurementModel<T> for Affine<T> {
    fn value(&self, x: T) -> Result<T> {
        Ok(self.slope * x + self.offset)
    }

    fn inverse(&self, z: T) -> Result<T> {
        Ok((z - self.offset) / self.slope)
    }

    fn derivative(&self, _x: T) -> Result<T> {
        Ok(self.slope)
    }

    fn second_derivative(&self, _x: T) -> Result<T> {
        Ok(T::zero())
    }

    fn increment(&self, _x: T, dx: T) -> Result<T> {
        Ok(self.slope * dx)
    }
}

/// Runtime choice among the built-in models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model<T> {
    Power(PowerLaw<T>),
    Anomaly(AnomalyMap<T>),
    Affine(Affine<T>),
}

impl<T: Scalar> Model<T> {
    pub fn power(lambda: T) -> Result<Self> {
        PowerLaw::new(lambda).map(Self::Power)
    }

    pub fn anomaly(e: T) -> Result<Self> {
        Eccentricity::new(e).map(|e| Self::Anomaly(AnomalyMap::new(e)))
    }

    pub fn affine(a: T, b: T) -> Result<Self> {
        Affine::new(a, b).map(Self::Affine)
    }

    fn inner(&self) -> &dyn MeasurementModel<T> {
        match self {
            Self::Power(m) => m,
            Self::Anomaly(m) => m,
            Self::Affine(m) => m,
        }
    }
}

impl<T: Scalar> MeasurementModel<T> for Model<T> {
    fn value(&self, x: T) -> Result<T> {
        self.inner().value(x)
    }
    fn inverse(&self, z: T) -> Result<T> {
        self.inner().inverse(z)
    }
    fn derivative(&self, x: T) -> Result<T> {
        self.inner().derivative(x)
    }
    fn second_derivative(&self, x: T) -> Result<T> {
        self.inner().second_derivative(x)
    }
    fn increment(&self, x: T, dx: T) -> Result<T> {
        self.inner().increment(x, dx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_law_values() {
        let sq = PowerLaw::new(2.0).unwrap();
        assert_eq!(sq.value(1.5).unwrap(), 2.25);
        assert_relative_eq!(sq.inverse(2.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(sq.derivative(1.0).unwrap(), 2.0);
        assert_eq!(sq.second_derivative(3.0).unwrap(), 2.0);
        let root = PowerLaw::new(0.5).unwrap();
        assert_relative_eq!(root.inverse(2.0).unwrap(), 4.0, epsilon = 1e-15);
        assert_eq!(root.derivative(1.0).unwrap(), 0.5);
    }

    #[test]
    fn power_law_domain() {
        let sq = PowerLaw::new(2.0).unwrap();
        assert!(matches!(sq.value(-1.0), Err(FilterError::Domain(_))));
        assert!(matches!(sq.value(0.0), Err(FilterError::Domain(_))));
        assert!(matches!(sq.inverse(0.0), Err(FilterError::Domain(_))));
        assert!(sq.derivative(f64::NAN).is_err());
        assert!(PowerLaw::new(0.0).is_err());
        assert!(PowerLaw::new(-2.0).is_err());
    }

    #[test]
    fn anomaly_map_values() {
        let m = Model::<f64>::anomaly(0.7).unwrap();
        assert!((m.value(310.0).unwrap() - 225.5).abs() < 0.05);
        assert!((m.inverse(143.6).unwrap() - 65.0).abs() < 0.05);
        assert_relative_eq!(m.derivative(0.0).unwrap(), 0.51f64.sqrt() / 0.09, max_relative = 1e-12);
        assert!(m.inverse(f64::INFINITY).is_err());
    }

    #[test]
    fn affine_values_and_validation() {
        let id = Affine::<f64>::identity();
        assert_eq!(id.value(7.0).unwrap(), 7.0);
        let m = Affine::new(-2.0, 3.0).unwrap();
        assert_eq!(m.inverse(m.value(1.25).unwrap()).unwrap(), 1.25);
        assert_eq!(m.derivative(100.0).unwrap(), -2.0);
        assert!(Affine::new(0.0, 1.0).is_err());
    }

    #[test]
    fn unit_power_law_is_identity() {
        let p = PowerLaw::new(1.0).unwrap();
        let a = Affine::<f64>::identity();
        for &x in &[0.1, 1.0, 3.7, 250.0] {
            assert_eq!(p.value(x).unwrap(), a.value(x).unwrap());
            assert_eq!(p.inverse(x).unwrap(), a.inverse(x).unwrap());
            assert_eq!(p.derivative(x).unwrap(), a.derivative(x).unwrap());
            assert_eq!(p.second_derivative(x).unwrap(), a.second_derivative(x).unwrap());
        }
    }
}
