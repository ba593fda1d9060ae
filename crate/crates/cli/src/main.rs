//! `gasflex`: validate system files, solve them with either gas flow model and
//! compare the two.
//!
//! Exit codes: 0 success, 1 invalid data or arguments, 2 I/O error,
//! 3 infeasible, 4 solver error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gasflex::formulation::FlowModel;
use gasflex::solver::{Backend, FileBackend, HighsBackend};

use commands::{Failure, RunSettings, EXIT_INVALID};
use config::{ConfigError, RunConfig, BUILTIN_SOLVER};

const DEFAULT_OUTPUT: &str = "gasflex-output";

#[derive(Debug, Parser)]
#[command(
    name = "gasflex",
    version,
    about = "Integrated power and gas scheduling"
)]
struct Cli {
    /// Run configuration file (TOML).
    #[arg(long, global = true, env = "GASFLEX_CONFIG")]
    config: Option<PathBuf>,
    /// External solver command speaking the HiGHS command-line protocol, or
    /// `builtin` for the linked HiGHS library.
    #[arg(long, global = true, env = "GASFLEX_SOLVER")]
    solver: Option<String>,
    /// Directory for solution and report files.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Log more (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a system file and list every violation.
    Validate { file: PathBuf },
    /// Solve one gas flow model.
    Solve {
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve both models and write comparison reports.
    Compare {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// 1-based hours at which a new horizon window starts.
    #[arg(long, value_delimiter = ',')]
    split: Vec<usize>,
    /// Expansion points per pipeline and direction.
    #[arg(long)]
    points: Option<usize>,
    /// Drop the flow-direction tightening constraints.
    #[arg(long)]
    no_tightening: bool,
    file: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Uni,
    Bi,
}

impl From<Mode> for FlowModel {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Uni => FlowModel::Unidirectional,
            Mode::Bi => FlowModel::Bidirectional,
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn backend(flag: Option<&str>, config: &RunConfig) -> Result<Box<dyn Backend>, Failure> {
    let command = flag.or(config.solver.command.as_deref());
    match command.map(str::trim) {
        None | Some(BUILTIN_SOLVER) => Ok(Box::new(HighsBackend)),
        Some(cmd) => FileBackend::from_command(cmd)
            .map(|b| Box::new(b) as Box<dyn Backend>)
            .ok_or_else(|| Failure::new(EXIT_INVALID, "empty solver command")),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            ConfigError::Io(p, err) => Failure::io(&p, err),
            ConfigError::Parse(p, msg) => {
                Failure::new(EXIT_INVALID, format!("{}: {msg}", p.display()))
            }
        })?,
        None => RunConfig::default(),
    };
    let (mode, args) = match cli.command {
        Command::Validate { file } => return commands::validate(&file),
        Command::Solve { mode, run } => (Some(FlowModel::from(mode)), run),
        Command::Compare { run } => (None, run),
    };
    let backend = backend(cli.solver.as_deref(), &config)?;
    let settings = RunSettings {
        formulation: config.formulation(args.points, args.no_tightening),
        options: config.solve_options(),
        split: args.split,
        backend: backend.as_ref(),
        output: cli
            .output
            .or_else(|| config.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
    };
    log::info!("solver backend: {}", settings.backend.name());
    match mode {
        Some(mode) => commands::solve(&args.file, mode, &settings),
        None => commands::compare(&args.file, &settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
