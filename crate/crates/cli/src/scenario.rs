//! Scenario definitions and the built-in examples.

use nlkf::{Measurement, Model};
use serde::{Deserialize, Serialize};

use crate::error::{ReproError, Result};

/// Measurement map plus its parameters, tagged by `model` in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Power { lambda: f64 },
    Anomaly { e: f64 },
    Affine { a: f64, b: f64 },
}

impl ModelSpec {
    pub fn build(&self) -> nlkf::Result<Model> {
        match *self {
            Self::Power { lambda } => Model::power(lambda),
            Self::Anomaly { e } => Model::anomaly(e),
            Self::Affine { a, b } => Model::affine(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(skip)]
    pub label: String,
    #[serde(flatten)]
    pub model: ModelSpec,
    /// Prior mean.
    pub mu: f64,
    /// Prior standard deviation.
    pub sigma: f64,
    /// Observed value on the measurement scale.
    pub z: f64,
    /// Observation noise standard deviation.
    pub tau: f64,
}

/// Eccentricity shared by both orbital examples.
pub const EXAMPLE_ECCENTRICITY: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TauCase {
    A,
    B,
    C,
}

impl TauCase {
    pub const ALL: [TauCase; 3] = [TauCase::A, TauCase::B, TauCase::C];

    pub fn tau(self) -> f64 {
        match self {
            Self::A => 0.0,
            Self::B => 5.5e-4,
            Self::C => 2.0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Self::A => 'a',
            Self::B => 'b',
            Self::C => 'c',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'a' => Some(Self::A),
            'b' => Some(Self::B),
            'c' => Some(Self::C),
            _ => None,
        }
    }
}

impl Scenario {
    pub fn new(label: impl Into<String>, model: ModelSpec, mu: f64, sigma: f64, z: f64, tau: f64) -> Result<Self> {
        let s = Self { label: label.into(), model, mu, sigma, z, tau };
        s.validate()?;
        Ok(s)
    }

    /// Orbital example 1 or 2 with the given observation noise.
    pub fn example(which: u8, case: TauCase) -> Result<Self> {
        let (mu, sigma, z) = match which {
            1 => (260.0, 25.0, 225.5),
            2 => (35.0, 15.0, 143.6),
            _ => {
                return Err(ReproError::Scenario {
                    label: format!("{which}({})", case.letter()),
                    reason: "only examples 1 and 2 exist".into(),
                })
            }
        };
        let model = ModelSpec::Anomaly { e: EXAMPLE_ECCENTRICITY };
        Self::new(format!("{which}({})", case.letter()), model, mu, sigma, z, case.tau())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(ReproError::Scenario { label: self.label.clone(), reason });
        for (name, v) in [("mu", self.mu), ("sigma", self.sigma), ("z", self.z), ("tau", self.tau)] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.sigma < 0.0 {
            return bad(format!("sigma must be >= 0, got {}", self.sigma));
        }
        if self.tau < 0.0 {
            return bad(format!("tau must be >= 0, got {}", self.tau));
        }
        if let Err(e) = self.model.build() {
            return bad(e.to_string());
        }
        Ok(())
    }

    pub fn prior(&self) -> nlkf::Result<nlkf::GaussianBelief> {
        nlkf::GaussianBelief::from_sd(self.mu, self.sigma)
    }

    pub fn measurement(&self) -> nlkf::Result<Measurement> {
        Measurement::new(self.z, self.tau)
    }
}
