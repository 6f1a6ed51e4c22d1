//! Scenario files: one TOML table per scenario, keyed by its label.
//!
//! ```toml
//! [example-1c]
//! model = "anomaly"
//! e = 0.7
//! mu = 260.0
//! sigma = 25.0
//! z = 225.5
//! tau = 2.0
//! ```

use std::path::Path;

use crate::error::{ReproError, Result};
use crate::scenario::Scenario;

/// Parses scenarios in file order and validates each one.
pub fn read_config(text: &str) -> Result<Vec<Scenario>> {
    let table: toml::Table = text.parse()?;
    table
        .into_iter()
        .map(|(label, value)| {
            let mut s: Scenario = value.try_into()?;
            s.label = label;
            s.validate()?;
            Ok(s)
        })
        .collect()
}

pub fn write_config(scenarios: &[Scenario]) -> Result<String> {
    let mut table = toml::Table::new();
    for s in scenarios {
        if table.contains_key(&s.label) {
            return Err(ReproError::Invalid(format!("duplicate scenario label {:?}", s.label)));
        }
        table.insert(s.label.clone(), toml::Value::try_from(s)?);
    }
    Ok(toml::to_string(&table)?)
}

pub fn load_config(path: &Path) -> Result<Vec<Scenario>> {
    read_config(&std::fs::read_to_string(path)?)
}

pub fn save_config(path: &Path, scenarios: &[Scenario]) -> Result<()> {
    std::fs::write(path, write_config(scenarios)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ModelSpec, TauCase};

    #[test]
    fn round_trip_preserves_order_and_values() {
        let scenarios = vec![
            Scenario::example(2, TauCase::C).unwrap(),
            Scenario::new("sq", ModelSpec::Power { lambda: 2.0 }, 1.0, 0.5, 2.0, 0.1).unwrap(),
            Scenario::new("line", ModelSpec::Affine { a: -1.5, b: 0.25 }, 0.1, 1.0 / 3.0, 2.0, 1.0).unwrap(),
        ];
        let text = write_config(&scenarios).unwrap();
        assert_eq!(read_config(&text).unwrap(), scenarios);
    }

    #[test]
    fn parses_hand_written_file() {
        let text = "[orbit]\nmodel = \"anomaly\"\ne = 0.7\nmu = 260\nsigma = 25.0\nz = 225.5\ntau = 2.0\n";
        let s = &read_config(text).unwrap()[0];
        assert_eq!(s.label, "orbit");
        assert_eq!(s.model, ModelSpec::Anomaly { e: 0.7 });
        assert_eq!(s.mu, 260.0);
    }

    #[test]
    fn rejects_invalid_entries() {
        assert!(read_config("[x]\nmodel = \"power\"\nlambda = -1.0\nmu = 1.0\nsigma = 1.0\nz = 1.0\ntau = 0.0\n").is_err());
        assert!(read_config("[x]\nmodel = \"cubic\"\nmu = 1.0\nsigma = 1.0\nz = 1.0\ntau = 0.0\n").is_err());
        assert!(read_config("[x]\nmodel = \"affine\"\na = 1.0\nb = 0.0\nmu = 1.0\nz = 1.0\ntau = 0.0\n").is_err());
    }
}
