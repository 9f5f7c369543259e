use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aqin_cli::commands::{self, check_mappings, validate, zoo_list};
use aqin_cli::config::ConfigFile;
use aqin_cli::{ExperimentConfig, Failure, Overrides};
use aqin_core::mappings::SampleConfig;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "aqin",
    version,
    about = "Implicit iteration experiments for families of nonlinear maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Registered scenario name instead of a config file.
    #[arg(long)]
    scenario: Option<String>,
    /// Override the error-term seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of outer steps.
    #[arg(long)]
    horizon: Option<usize>,
    /// Run the inner solver even without a certified contraction.
    #[arg(long)]
    allow_noncontractive: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write trace.csv and summary.json.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Check the schedule hypotheses without running.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Sample-test the declared properties of a zoo mapping or family.
    CheckMappings {
        /// Zoo name, e.g. `paper`, `identity`, `linear_contraction(a=2)`.
        name: String,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest power tested.
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// List zoo entries and registered scenarios.
    ZooList,
}

fn load(source: &Source) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&source.config, &source.scenario) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::resolve(ConfigFile {
            scenario: Some(name.clone()),
            ..Default::default()
        })?,
        (None, None) => return Err(Failure::config("need --config or --scenario")),
    };
    cfg.apply(Overrides {
        seed: source.seed,
        horizon: source.horizon,
        allow_noncontractive: source.allow_noncontractive,
    });
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run { source, out_dir } => {
            let cfg = load(&source)?;
            let outcome = commands::run(&cfg, &out_dir)?;
            let last = outcome.trace.last();
            writeln!(
                out,
                "{}: {} after {} steps, dist_F = {:e}; wrote {} and {}",
                cfg.name,
                outcome.trace.terminated.as_str(),
                outcome.trace.steps.len(),
                last.map_or(f64::NAN, |s| s.dist_f),
                outcome.csv_path.display(),
                outcome.summary_path.display()
            )
            .map_err(|e| Failure::internal(e.to_string()))
        }
        Command::Validate { source } => validate(&load(&source)?, &mut out),
        Command::CheckMappings {
            name,
            dim,
            samples,
            seed,
            n_max,
        } => check_mappings(&name, dim, SampleConfig { n_max, samples, seed }, &mut out),
        Command::ZooList => zoo_list(&mut out).map_err(|e| Failure::internal(e.to_string())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
