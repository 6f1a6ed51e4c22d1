//! Reproduction harness for the `nlkf` filters: scenario configs, the
//! comparison tables, figure data and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;
pub mod scenario;

pub use error::{ReproError, Result};
pub use figures::{emit_fig1, emit_fig2, Fig1, Fig2};
pub use run::{run_examples, run_filter, run_scenario, run_table1, FilterKind, RunManifest, RunSettings, Table1Row};
pub use scenario::{ModelSpec, Scenario, TauCase};
