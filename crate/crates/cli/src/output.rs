//! Human-readable tables and machine-readable CSV/JSON output.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::run::{RunManifest, Table1Row};

/// Means shown with one decimal, or four when `fine` is set.
pub fn display_mean(v: f64, fine: bool) -> String {
    if fine {
        format!("{v:.4}")
    } else {
        format!("{v:.1}")
    }
}

/// Zero as `0`, small values as two-digit scientific (`7.7E-04`),
/// everything else with one decimal.
pub fn display_sd(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 0.05 || !v.is_finite() {
        return format!("{v:.1}");
    }
    let mut exp = v.abs().log10().floor() as i32;
    let mut mant = v / 10f64.powi(exp);
    if (mant.abs() * 10.0).round() >= 100.0 {
        mant /= 10.0;
        exp += 1;
    }
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant:.1}E{sign}{:02}", exp.abs())
}

fn pad(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn manifest_table(rows: &[RunManifest], fine_means: bool) -> String {
    let mut cells = vec![["scenario", "filter", "mean", "sd", "iter", "warnings"].map(String::from).to_vec()];
    for r in rows {
        cells.push(vec![
            r.scenario.clone(),
            r.filter.name().to_uppercase(),
            r.mean_deg.map_or_else(|| "-".into(), |m| display_mean(m, fine_means)),
            r.sd_deg.map_or_else(|| "-".into(), display_sd),
            r.iterations.to_string(),
            r.warnings.join("; "),
        ]);
    }
    pad(&cells)
}

pub fn table1_table(rows: &[Table1Row]) -> String {
    let mut cells = vec![["lambda", "EKF", "IEKF", "OCEKF", "Exact"].map(String::from).to_vec()];
    for r in rows {
        let mut line = vec![format!("{}", r.lambda)];
        line.extend([r.ekf, r.iekf, r.ocekf, r.exact].map(|v| format!("{v:.2}")));
        cells.push(line);
    }
    pad(&cells)
}

#[derive(Serialize)]
struct ManifestCsvRow<'a> {
    scenario: &'a str,
    filter: &'static str,
    alpha: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    mean_deg: Option<f64>,
    sd_deg: Option<f64>,
    iterations: usize,
    warnings: String,
}

/// Columns: scenario, filter, alpha, tol, max_iter, mean_deg, sd_deg,
/// iterations, warnings. Numbers use the shortest exact decimal form.
pub fn write_manifest_csv<W: Write>(rows: &[RunManifest], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(ManifestCsvRow {
            scenario: &r.scenario,
            filter: r.filter.name(),
            alpha: r.alpha,
            tol: r.tol,
            max_iter: r.max_iter,
            mean_deg: r.mean_deg,
            sd_deg: r.sd_deg,
            iterations: r.iterations,
            warnings: r.warnings.join("; "),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_manifest_json<W: Write>(rows: &[RunManifest], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_table1_csv<W: Write>(rows: &[Table1Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table1_json<W: Write>(rows: &[Table1Row], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}
