use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use irclab_cli::{execute, parse_config, write_output, CliError};

/// Runs one IRC experiment described by a TOML file and emits CSV.
#[derive(Debug, Parser)]
#[command(name = "irclab", version)]
struct Args {
    /// Experiment description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Print LD block diagrams to standard output (ld-sim only).
    #[arg(long)]
    trace: bool,
}

fn run(args: Args) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    let mut stdout = io::stdout().lock();
    let csv = execute(&cfg, args.trace.then_some(&mut stdout as &mut dyn Write))?;
    match &cfg.out {
        Some(path) => write_output(path, &csv),
        None => stdout
            .write_all(&csv)
            .map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("irclab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
