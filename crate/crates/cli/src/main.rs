use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use nlkf::{IterationControl, IterationStart, DEFAULT_ALPHA};
use nlkf_repro::config::{load_config, save_config};
use nlkf_repro::figures::{write_fig1_csv, write_fig2_csv, FIG1_ECCENTRICITIES};
use nlkf_repro::output::{
    display_sd, manifest_table, table1_table, write_manifest_csv, write_manifest_json, write_table1_csv,
    write_table1_json,
};
use nlkf_repro::{
    emit_fig1, emit_fig2, run_examples, run_filter, run_scenario, run_table1, FilterKind, ModelSpec, Scenario,
    RunSettings, TauCase,
};

#[derive(Parser)]
#[command(name = "nlkf", version, about = "Scalar nonlinear Kalman filter comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MachineOutput {
    /// Write full-precision rows as CSV
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Write full-precision rows as JSON
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Power-law example with a perfect observation
    Table1 {
        #[command(flatten)]
        out: MachineOutput,
    },
    /// All filters on one orbital example
    Table3 {
        #[arg(long, value_parser = ["1", "2"])]
        example: String,
        #[arg(long, value_parser = ["a", "b", "c"])]
        case: String,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[command(flatten)]
        out: MachineOutput,
    },
    /// True against mean anomaly, as CSV
    Fig1 {
        /// Mean-anomaly spacing in degrees
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Eccentricities, one column each
        #[arg(long = "e", value_delimiter = ',', default_values_t = FIG1_ECCENTRICITIES)]
        eccentricities: Vec<f64>,
        /// Output file; standard output if omitted
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Example 1(c) posterior density and filter Gaussians, as CSV
    Fig2 {
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Output file; standard output if omitted
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// One measurement update
    #[command(allow_negative_numbers = true)]
    Update(UpdateArgs),
    /// All filters on every scenario in a config file
    Run {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Restrict to these filters
        #[arg(long, value_delimiter = ',')]
        filter: Vec<FilterKind>,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        out: MachineOutput,
    },
    /// Write the six orbital example scenarios as a config file
    InitConfig {
        path: PathBuf,
    },
}

#[derive(Args)]
struct Tuning {
    /// Sigma-point spread for the unscented filters
    #[arg(long)]
    alpha: Option<f64>,
    /// Fixed-point tolerance for the iterated filters
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget for the iterated filters
    #[arg(long)]
    max_iter: Option<usize>,
    /// Start iterated filters from the one-shot update instead of the prior mean
    #[arg(long)]
    one_shot_start: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Power,
    Anomaly,
    Affine,
}

#[derive(Args)]
struct UpdateArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Eccentricity (anomaly model)
    #[arg(long)]
    e: Option<f64>,
    /// Exponent (power model)
    #[arg(long)]
    lambda: Option<f64>,
    /// Slope (affine model)
    #[arg(long)]
    a: Option<f64>,
    /// Offset (affine model)
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    z: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    filter: FilterKind,
    #[command(flatten)]
    tuning: Tuning,
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn settings(t: &Tuning) -> RunSettings {
    let mut s = RunSettings::default();
    if let Some(a) = t.alpha {
        s.alpha = a;
    }
    let tol = t.tol.unwrap_or(s.control.tol);
    let max_iter = t.max_iter.unwrap_or(s.control.max_iter);
    s.control = IterationControl::new(tol, max_iter).unwrap_or_else(|e| usage_error(ErrorKind::InvalidValue, e));
    if t.one_shot_start {
        s.control = s.control.with_start(IterationStart::OneShot);
    }
    s
}

fn model_spec(args: &UpdateArgs) -> ModelSpec {
    let need = |v: Option<f64>, flag: &str, model: &str| {
        v.unwrap_or_else(|| usage_error(ErrorKind::MissingRequiredArgument, format!("--model {model} requires --{flag}")))
    };
    match args.model {
        ModelKind::Power => ModelSpec::Power { lambda: need(args.lambda, "lambda", "power") },
        ModelKind::Anomaly => ModelSpec::Anomaly { e: need(args.e, "e", "anomaly") },
        ModelKind::Affine => ModelSpec::Affine { a: need(args.a, "a", "affine"), b: args.b.unwrap_or(0.0) },
    }
}

fn create(path: &Path) -> nlkf_repro::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_manifests(rows: &[nlkf_repro::RunManifest], out: &MachineOutput) -> nlkf_repro::Result<()> {
    if let Some(p) = &out.csv {
        write_manifest_csv(rows, create(p)?)?;
    }
    if let Some(p) = &out.json {
        write_manifest_json(rows, create(p)?)?;
    }
    Ok(())
}

fn update(args: &UpdateArgs) -> nlkf_repro::Result<ExitCode> {
    if args.tuning.alpha.is_some() && !args.filter.is_unscented() {
        usage_error(ErrorKind::ArgumentConflict, format!("--alpha applies only to unscented filters, not {}", args.filter));
    }
    if (args.tuning.tol.is_some() || args.tuning.max_iter.is_some() || args.tuning.one_shot_start)
        && !args.filter.is_iterated()
    {
        usage_error(ErrorKind::ArgumentConflict, format!("iteration flags apply only to iekf and iukf, not {}", args.filter));
    }
    let scenario = Scenario::new("update", model_spec(args), args.mu, args.sigma, args.z, args.tau)
        .unwrap_or_else(|e| usage_error(ErrorKind::InvalidValue, e));
    let row = run_filter(&scenario, args.filter, &settings(&args.tuning));
    match (row.mean_deg, row.sd_deg) {
        (Some(mean), Some(sd)) => {
            let warnings = if row.warnings.is_empty() { "none".to_string() } else { row.warnings.join("; ") };
            println!("{} mean={mean} sd={sd} iterations={} warnings={warnings}", row.filter, row.iterations);
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            eprintln!("{}: {}", row.filter, row.warnings.join("; "));
            Ok(ExitCode::FAILURE)
        }
    }
}

fn stdout_or(path: &Option<PathBuf>) -> nlkf_repro::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> nlkf_repro::Result<ExitCode> {
    match cli.command {
        Command::Table1 { out } => {
            let rows = run_table1()?;
            print!("{}", table1_table(&rows));
            if let Some(p) = &out.csv {
                write_table1_csv(&rows, create(p)?)?;
            }
            if let Some(p) = &out.json {
                write_table1_json(&rows, create(p)?)?;
            }
        }
        Command::Table3 { example, case, alpha, out } => {
            let which: u8 = example.parse().expect("restricted by clap");
            let case = TauCase::from_letter(case.chars().next().expect("restricted by clap")).expect("restricted by clap");
            let rows = run_examples(which, case, alpha)?;
            print!("{}", manifest_table(&rows, case == TauCase::B));
            write_manifests(&rows, &out)?;
        }
        Command::Fig1 { step, eccentricities, out } => {
            write_fig1_csv(&emit_fig1(&eccentricities, step)?, stdout_or(&out)?)?;
        }
        Command::Fig2 { alpha, out } => {
            let fig = emit_fig2(alpha)?;
            write_fig2_csv(&fig, stdout_or(&out)?)?;
            if out.is_some() {
                println!(
                    "exact mean={} sd={} ukf mean={} sd={} iukf mean={} sd={}",
                    fig.exact.mean,
                    display_sd(fig.exact.sd),
                    fig.ukf.mean(),
                    display_sd(fig.ukf.sd()),
                    fig.iukf.mean(),
                    display_sd(fig.iukf.sd()),
                );
            }
        }
        Command::Update(args) => return update(&args),
        Command::Run { config, filter, tuning, out } => {
            let scenarios = load_config(&config)?;
            let filters = if filter.is_empty() { FilterKind::ALL.to_vec() } else { filter };
            let s = settings(&tuning);
            let rows: Vec<_> = scenarios.iter().flat_map(|sc| run_scenario(sc, &filters, &s)).collect();
            print!("{}", manifest_table(&rows, false));
            write_manifests(&rows, &out)?;
        }
        Command::InitConfig { path } => {
            let mut scenarios = Vec::new();
            for which in [1, 2] {
                for case in TauCase::ALL {
                    scenarios.push(Scenario::example(which, case)?);
                }
            }
            save_config(&path, &scenarios)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
