//! `hdqkd`: distribution tables, distance sweeps and security sweeps for
//! asymmetric homodyne and double-homodyne receivers.

mod commands;
mod config;
mod output;
mod presets;
mod validate;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hdqkd::Execution;

use crate::commands::RunOptions;
use crate::config::Config;
use crate::output::{Format, Table};

#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable or malformed config, out-of-range parameter.
    Config(String),
    /// A computation failed on admissible input.
    Numerical(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<hdqkd::Error> for Failure {
    fn from(e: hdqkd::Error) -> Self {
        match e {
            hdqkd::Error::InvalidParameter { .. } | hdqkd::Error::Unsupported(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hdqkd", version, about = "Homodyne and double-homodyne receiver statistics and CV-QKD security sweeps")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (see `hdqkd presets`).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads; 1 evaluates sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed of the Monte Carlo sampler and the randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and approximate photocount distributions.
    Dist,
    /// Distances of the Gaussian approximations along a sweep axis.
    Tvd,
    /// Mutual information, Holevo bound and secret fraction along a sweep axis.
    Security,
    /// Run the oracle-equivalence checks.
    Validate,
    /// List the built-in configurations.
    Presets,
}

fn load_config(args: &GlobalArgs) -> Result<Config, Failure> {
    match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            config::parse(&text)
        }
        (None, Some(name)) => {
            let preset = presets::find(name).ok_or_else(|| {
                let names: Vec<&str> = presets::ALL.iter().map(|p| p.name).collect();
                Failure::Config(format!("unknown preset `{name}`; available: {}", names.join(", ")))
            })?;
            config::parse(preset.json)
        }
        _ => Err(Failure::Config("give either --config or --preset".into())),
    }
}

fn execution(threads: Option<usize>) -> Result<Execution, Failure> {
    match threads {
        Some(0) => Err(Failure::Config("--threads must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Config(format!("cannot start {n} threads: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::default()),
    }
}

fn emit(table: &Table, args: &GlobalArgs) -> Result<(), Failure> {
    match &args.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(args.format, &mut w)?;
            w.flush().map_err(|e| Failure::Io(e.to_string()))
        }
        None => table.write(args.format, io::stdout().lock()),
    }
}

fn run_validate(seed: u64) -> Result<bool, Failure> {
    let checks = validate::run(seed);
    let mut out = io::stdout().lock();
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} {}: {}", c.name, c.detail).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(out, "{passed} of {} checks passed", checks.len()).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(passed == checks.len())
}

fn list_presets() -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    for p in presets::ALL {
        writeln!(out, "{:<12} {:<9} {}", p.name, p.command, p.description).map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let args = &cli.global;
    let exec = execution(args.threads)?;
    let opts = RunOptions { exec, seed: args.seed };
    let table = match cli.command {
        Command::Validate => {
            return Ok(if run_validate(args.seed)? { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
        Command::Presets => {
            list_presets()?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Dist => commands::dist(&load_config(args)?, &opts)?,
        Command::Tvd => commands::tvd(&load_config(args)?, &opts)?,
        Command::Security => commands::security(&load_config(args)?, &opts)?,
    };
    emit(&table, args)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hdqkd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
