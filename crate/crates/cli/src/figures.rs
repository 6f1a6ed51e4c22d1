//! Data behind the anomaly-map plot and the example 1(c) density plot.

use std::io::Write;

use nlkf::kepler::{mean_to_true, Eccentricity};
use nlkf::{exact_posterior_moments, iukf_update, posterior_density_grid, ukf_update, GaussianBelief, PosteriorSummary};

use crate::error::{ReproError, Result};
use crate::run::RunSettings;
use crate::scenario::{Scenario, TauCase};

/// True anomaly against mean anomaly over one turn, one column per
/// eccentricity.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1 {
    pub eccentricities: Vec<f64>,
    /// `(M, [T for each e])`.
    pub rows: Vec<(f64, Vec<f64>)>,
}

pub const FIG1_ECCENTRICITIES: [f64; 2] = [0.0, 0.7];

pub fn emit_fig1(e_list: &[f64], step: f64) -> Result<Fig1> {
    if !(step > 0.0 && step <= 360.0) {
        return Err(ReproError::Invalid(format!("step must lie in (0, 360], got {step}")));
    }
    let eccs = e_list.iter().map(|&e| Eccentricity::new(e)).collect::<nlkf::Result<Vec<_>>>()?;
    let n = (360.0 / step).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if grid.last().is_some_and(|&m| m < 360.0) {
        grid.push(360.0);
    }
    let rows = grid
        .into_iter()
        .map(|m| Ok((m, eccs.iter().map(|&e| mean_to_true(m, e)).collect::<nlkf::Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig1 { eccentricities: e_list.to_vec(), rows })
}

/// Columns `M_deg`, then `T_e<e>` per eccentricity.
pub fn write_fig1_csv<W: Write>(fig: &Fig1, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["M_deg".to_string()];
    header.extend(fig.eccentricities.iter().map(|e| format!("T_e{e}")));
    w.write_record(&header)?;
    for (m, ts) in &fig.rows {
        let mut rec = vec![m.to_string()];
        rec.extend(ts.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub const FIG2_POINTS: usize = 2001;

/// Exact posterior density and the UKF and IUKF Gaussians on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2 {
    pub scenario: Scenario,
    pub exact: PosteriorSummary,
    pub ukf: GaussianBelief,
    pub iukf: GaussianBelief,
    /// `[x, exact, ukf, iukf]`.
    pub rows: Vec<[f64; 4]>,
}

pub fn fig2_for(scenario: &Scenario, settings: &RunSettings) -> Result<Fig2> {
    if !(scenario.tau > 0.0) {
        return Err(ReproError::Invalid(format!("density plot needs tau > 0, scenario {} has {}", scenario.label, scenario.tau)));
    }
    let model = scenario.model.build()?;
    let prior = scenario.prior()?;
    let obs = scenario.measurement()?;
    let exact = exact_posterior_moments(&prior, &model, &obs, &settings.quadrature)?;
    let ukf = ukf_update(&prior, &model, &obs, settings.alpha)?.belief;
    let iukf = iukf_update(&prior, &model, &obs, settings.alpha, &settings.control)?.belief;
    let half = 6.0 * exact.sd.max(ukf.sd());
    let density = posterior_density_grid(&prior, &model, &obs, exact.mean - half, exact.mean + half, FIG2_POINTS)?;
    let rows = density.into_iter().map(|(x, p)| [x, p, ukf.pdf(x), iukf.pdf(x)]).collect();
    Ok(Fig2 { scenario: scenario.clone(), exact, ukf, iukf, rows })
}

/// Example 1(c).
pub fn emit_fig2(alpha: f64) -> Result<Fig2> {
    fig2_for(&Scenario::example(1, TauCase::C)?, &RunSettings::with_alpha(alpha))
}

/// Columns `x_deg, exact, ukf, iukf`.
pub fn write_fig2_csv<W: Write>(fig: &Fig2, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x_deg", "exact", "ukf", "iukf"])?;
    for row in &fig.rows {
        w.write_record(row.map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_grid_and_fixed_points() {
        let fig = emit_fig1(&FIG1_ECCENTRICITIES, 1.0).unwrap();
        assert_eq!(fig.rows.len(), 361);
        for (m, ts) in &fig.rows {
            assert_eq!(ts[0], *m);
        }
        let (_, at180) = &fig.rows[180];
        assert!((at180[1] - 180.0).abs() < 1e-12);
        assert!((fig.rows[310].1[1] - 225.5).abs() < 0.05);
        assert!((fig.rows[65].1[1] - 143.6).abs() < 0.05);
    }

    #[test]
    fn fig1_closes_the_turn() {
        let fig = emit_fig1(&[0.3], 7.0).unwrap();
        assert_eq!(fig.rows.last().unwrap().0, 360.0);
        assert!(emit_fig1(&[0.3], 0.0).is_err());
        assert!(emit_fig1(&[1.2], 1.0).is_err());
    }

    #[test]
    fn fig1_csv_header() {
        let mut buf = Vec::new();
        write_fig1_csv(&emit_fig1(&FIG1_ECCENTRICITIES, 90.0).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("M_deg,T_e0,T_e0.7\n0,0,0\n"));
    }

    #[test]
    fn fig2_rejects_noiseless_scenario() {
        let s = Scenario::example(1, TauCase::A).unwrap();
        assert!(fig2_for(&s, &RunSettings::default()).is_err());
    }
}
