//! Running filters on scenarios and collecting manifest rows.

use std::fmt;
use std::str::FromStr;

use nlkf::{
    ekf_update, exact_posterior_moments, iekf_update, iukf_update, ocekf_update, ocukf_update, ukf_update,
    IterationControl, QuadratureConfig, Update, DEFAULT_ALPHA,
};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{ModelSpec, Scenario, TauCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Exact,
    Ekf,
    Ukf,
    Iekf,
    Iukf,
    Ocekf,
    Ocukf,
}

impl FilterKind {
    /// Row order of the comparison table.
    pub const ALL: [FilterKind; 7] = [
        FilterKind::Exact,
        FilterKind::Ekf,
        FilterKind::Ukf,
        FilterKind::Iekf,
        FilterKind::Iukf,
        FilterKind::Ocekf,
        FilterKind::Ocukf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Ekf => "ekf",
            Self::Ukf => "ukf",
            Self::Iekf => "iekf",
            Self::Iukf => "iukf",
            Self::Ocekf => "ocekf",
            Self::Ocukf => "ocukf",
        }
    }

    pub fn is_unscented(self) -> bool {
        matches!(self, Self::Ukf | Self::Iukf | Self::Ocukf)
    }

    pub fn is_iterated(self) -> bool {
        matches!(self, Self::Iekf | Self::Iukf)
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown filter {s:?}; expected one of exact, ekf, ukf, iekf, iukf, ocekf, ocukf"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub alpha: f64,
    pub control: IterationControl<f64>,
    pub quadrature: QuadratureConfig,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { alpha: DEFAULT_ALPHA, control: IterationControl::default(), quadrature: QuadratureConfig::default() }
    }
}

impl RunSettings {
    pub fn with_alpha(alpha: f64) -> Self {
        Self { alpha, ..Self::default() }
    }
}

/// One filter applied to one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub filter: FilterKind,
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub mean_deg: Option<f64>,
    pub sd_deg: Option<f64>,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn succeeded(&self) -> bool {
        self.mean_deg.is_some()
    }
}

fn apply(scenario: &Scenario, kind: FilterKind, settings: &RunSettings) -> Result<Update<f64>> {
    let model = scenario.model.build()?;
    let prior = scenario.prior()?;
    let obs = scenario.measurement()?;
    let a = settings.alpha;
    let ctl = &settings.control;
    let up = match kind {
        FilterKind::Exact => {
            let s = exact_posterior_moments(&prior, &model, &obs, &settings.quadrature)?;
            let belief = nlkf::GaussianBelief::from_sd(s.mean, s.sd)?;
            Update { belief, iterations: 1, warnings: Vec::new() }
        }
        FilterKind::Ekf => ekf_update(&prior, &model, &obs)?,
        FilterKind::Ukf => ukf_update(&prior, &model, &obs, a)?,
        FilterKind::Iekf => iekf_update(&prior, &model, &obs, ctl)?,
        FilterKind::Iukf => iukf_update(&prior, &model, &obs, a, ctl)?,
        FilterKind::Ocekf => ocekf_update(&prior, &model, &obs)?,
        FilterKind::Ocukf => ocukf_update(&prior, &model, &obs, a)?,
    };
    Ok(up)
}

/// Runs one filter. Failures land in `warnings` with no mean or sd.
pub fn run_filter(scenario: &Scenario, kind: FilterKind, settings: &RunSettings) -> RunManifest {
    let mut row = RunManifest {
        scenario: scenario.label.clone(),
        filter: kind,
        alpha: kind.is_unscented().then_some(settings.alpha),
        tol: kind.is_iterated().then_some(settings.control.tol),
        max_iter: kind.is_iterated().then_some(settings.control.max_iter),
        mean_deg: None,
        sd_deg: None,
        iterations: 0,
        warnings: Vec::new(),
    };
    match apply(scenario, kind, settings) {
        Ok(up) => {
            row.mean_deg = Some(up.mean());
            row.sd_deg = Some(up.sd());
            row.iterations = up.iterations;
            row.warnings = up.warnings.iter().map(ToString::to_string).collect();
        }
        Err(e) => row.warnings.push(format!("error: {e}")),
    }
    row
}

pub fn run_scenario(scenario: &Scenario, filters: &[FilterKind], settings: &RunSettings) -> Vec<RunManifest> {
    filters.iter().map(|&k| run_filter(scenario, k, settings)).collect()
}

/// All seven rows (exact plus six filters) for an orbital example.
pub fn run_examples(which: u8, case: TauCase, alpha: f64) -> Result<Vec<RunManifest>> {
    let scenario = Scenario::example(which, case)?;
    Ok(run_scenario(&scenario, &FilterKind::ALL, &RunSettings::with_alpha(alpha)))
}

/// Power-law example with a perfect observation `z = 2` of a prior at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub lambda: f64,
    pub ekf: f64,
    pub iekf: f64,
    pub ocekf: f64,
    pub exact: f64,
}

pub const TABLE1_LAMBDAS: [f64; 3] = [1.0, 2.0, 0.5];

pub fn run_table1() -> Result<Vec<Table1Row>> {
    let settings = RunSettings::default();
    TABLE1_LAMBDAS
        .iter()
        .map(|&lambda| {
            let scenario = Scenario::new(format!("lambda={lambda}"), ModelSpec::Power { lambda }, 1.0, 1.0, 2.0, 0.0)?;
            let mean = |kind| apply(&scenario, kind, &settings).map(|u| u.mean());
            Ok(Table1Row {
                lambda,
                ekf: mean(FilterKind::Ekf)?,
                iekf: mean(FilterKind::Iekf)?,
                ocekf: mean(FilterKind::Ocekf)?,
                exact: mean(FilterKind::Exact)?,
            })
        })
        .collect()
}
