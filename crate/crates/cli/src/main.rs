//! `grioli`: batch front end for the polar-factor optimality checks.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 invalid input / configuration / I/O,
//! 3 numerical failure (singular, orientation-reversing, no convergence), 4 no
//! counterexample found.

mod commands;
mod config;
mod landscape;
mod report;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use grioli_core::par::Execution;
use grioli_core::Error;

use config::{Engine, ObjectiveArg, Oracle, RunConfig, Suite};
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "grioli", version, about = "Polar-factor optimality: decompositions, rigid fits, verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON file with defaults for any option below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run every batch on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Include wall time in the report (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polar decomposition of a matrix file (JSON rows or CSV).
    Decompose {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        engine: Option<Engine>,
    },
    /// Best rigid motion for an affine map over a ball.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
        /// Haar samples for the oracle.
        #[arg(long)]
        samples: Option<usize>,
        /// Grid resolution for the oracle.
        #[arg(long)]
        resolution: Option<usize>,
        /// Finite-difference step when the input gives a displacement field.
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Run a verification suite; exit 1 if any assertion fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Sample count knob.
        #[arg(long)]
        scale: Option<usize>,
    },
    /// Search for F where the polar factor misses the weighted Euclidean minimum.
    Counterexample {
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        mu_c: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Energy over the w3 = 0 slice of axis-angle space, as CSV and SVG.
    Landscape {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        mu_c: Option<f64>,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: PathBuf, source: std::io::Error },
    Config(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                Error::AssertionFailure(_) | Error::LogOptimality(_) => 1,
                Error::Singular
                | Error::NonOrientation(_)
                | Error::NotSpd
                | Error::NoConvergence(_)
                | Error::BranchCut { .. } => 3,
                Error::NotFound { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Options shared by every command after merging flags over the config file.
pub struct Context {
    pub file: RunConfig,
    pub seed: u64,
    pub execution: Execution,
}

/// A finished command: the report and the process exit code it implies.
pub struct Finished {
    pub report: Report,
    pub code: u8,
}

impl Finished {
    pub fn from_report(report: Report) -> Self {
        let code = if report.passed() { 0 } else { 1 };
        Finished { report, code }
    }
}

fn run(cli: Cli) -> Result<(Finished, Option<PathBuf>), CliError> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = cli.out.clone().or(file.out.clone());
    let execution = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let ctx = Context { seed: cli.seed.or(file.seed).unwrap_or(0), execution, file };
    let start = Instant::now();
    let mut finished = match cli.command {
        Command::Decompose { input, engine } => commands::decompose(&ctx, input, engine)?,
        Command::Fit { input, radius, oracle, samples, resolution, fd_step } => {
            commands::fit(&ctx, commands::FitArgs { input, radius, oracle, samples, resolution, fd_step })?
        }
        Command::Verify { suite, scale } => verify::run(&ctx, suite, scale)?,
        Command::Counterexample { mu, mu_c, trials } => commands::counterexample(&ctx, mu, mu_c, trials)?,
        Command::Landscape { input, mu, mu_c, objective, resolution, csv, svg } => landscape::run(
            &ctx,
            landscape::LandscapeArgs { input, mu, mu_c, objective, resolution, csv, svg },
        )?,
    };
    if cli.timing {
        finished.report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    Ok((finished, out))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(finished, out)| {
        emit(&finished.report.render(), out.as_deref())?;
        Ok(finished.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
