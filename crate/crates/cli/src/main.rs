//! `irw`: run ensembles, verification procedures, rate fits and the exact
//! oracle from a TOML configuration.
//!
//! Exit codes: 0 success or passing test, 2 failing test, 3 invalid
//! configuration or arguments, 4 memory or enumeration budget exceeded,
//! 1 any other error.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use output::{Format, OutDir};

#[derive(Debug, Parser)]
#[command(name = "irw", version, about = "Mean-field interacting reinforced random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML config, or a manifest.json written by `simulate`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides ensemble.master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides ensemble.replications.
    #[arg(long)]
    reps: Option<u64>,
    /// Worker threads; defaults to the available parallelism. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Print the fully resolved config, defaults included, and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an ensemble and export snapshots, moments and a manifest.
    Simulate(RunArgs),
    /// Run one verification procedure and write report.json.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// One of the names listed in the README (e.g. polarization, sync-rate, fclt-fluct).
        #[arg(long)]
        theorem: String,
    },
    /// Fit the synchronization and convergence rates.
    Rates(RunArgs),
    /// Exact law for a tiny configuration plus variance recursions.
    Oracle(RunArgs),
    /// Grow a preferential-attachment tree and export degrees and hub gains.
    Graph {
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        /// Gain factor in r = lambda * d_max / (n + 1).
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Map an urn spec (TOML) to its gain schedule and kernel.
    Urn {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(irw_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        use irw_core::Error as E;
        match self {
            CliError::Config(_) => 3,
            CliError::Core(E::BudgetExceeded(_)) => 4,
            CliError::Core(E::Io(_) | E::Csv(_) | E::Json(_)) | CliError::Io(_) => 1,
            CliError::Core(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid config: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<irw_core::Error> for CliError {
    fn from(e: irw_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.ensemble.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.ensemble.replications = reps;
    }
    // The worker count never changes results, so it stays out of the
    // recorded config.
    cfg.ensemble.threads = None;
    Ok(cfg)
}

/// Resolves and validates the config; `None` when it was only printed.
fn prepare(args: &RunArgs) -> Result<Option<(RunConfig, OutDir)>, CliError> {
    let cfg = resolve(args)?;
    if args.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(None);
    }
    cfg.validate()?;
    let out = OutDir::create(&args.out, args.format)?;
    Ok(Some((cfg, out)))
}

fn finish(out: &OutDir) {
    for path in out.written() {
        println!("wrote {}", path.display());
    }
}

fn execute(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Simulate(args) => {
            if let Some((cfg, mut out)) = prepare(&args)? {
                commands::simulate(&cfg, args.threads, &mut out)?;
                finish(&out);
            }
            Ok(true)
        }
        Command::Verify { run, theorem } => {
            if !commands::THEOREMS.contains(&theorem.as_str()) {
                return Err(CliError::config(format!(
                    "unknown theorem '{theorem}'; expected one of: {}",
                    commands::THEOREMS.join(", ")
                )));
            }
            match prepare(&run)? {
                Some((cfg, mut out)) => {
                    let passed = commands::verify(&cfg, &theorem, run.threads, &mut out)?;
                    finish(&out);
                    Ok(passed)
                }
                None => Ok(true),
            }
        }
        Command::Rates(args) => {
            if let Some((cfg, mut out)) = prepare(&args)? {
                commands::rates(&cfg, args.threads, &mut out)?;
                finish(&out);
            }
            Ok(true)
        }
        Command::Oracle(args) => {
            if let Some((cfg, mut out)) = prepare(&args)? {
                commands::oracle(&cfg, &mut out)?;
                finish(&out);
            }
            Ok(true)
        }
        Command::Graph {
            delta,
            n_max,
            lambda,
            seed,
            out,
            format,
        } => {
            let mut out = OutDir::create(&out, format)?;
            commands::graph(delta, n_max, lambda, seed, &mut out)?;
            finish(&out);
            Ok(true)
        }
        Command::Urn {
            spec,
            horizon,
            out,
            format,
        } => {
            let mut out = OutDir::create(&out, format)?;
            commands::urn(Path::new(&spec), horizon, &mut out)?;
            finish(&out);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
