//! Configuration parsing and experiment dispatch for the `irclab` binary.

use std::fs;
use std::io::Write;
use std::path::Path;

use irclab::gaussian::{estimate_gdof, optimize_powers, upper_bound_sumrate};
use irclab::gdof::{sweep, GdofPoint};
use irclab::ld::{simulate, simulate_traced};
use irclab::report::{
    estimate_rows, write_estimate_rows, write_gauss_rows, write_gdof_rows, write_sim_rows, GaussRow,
};

mod config;

pub use config::{parse_config, AllocationChoice, Command, RunConfig, COMMANDS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 2 for anything wrong with the input, 1 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<irclab::Error> for CliError {
    fn from(e: irclab::Error) -> Self {
        match e {
            irclab::Error::Csv(m) => CliError::Runtime(format!("csv: {m}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// Runs one experiment and returns its CSV bytes. LD diagrams, when
/// requested, go to `trace_out`.
pub fn execute(cfg: &RunConfig, trace_out: Option<&mut dyn Write>) -> Result<Vec<u8>, CliError> {
    if trace_out.is_some() && !matches!(cfg.command, Command::LdSim { .. }) {
        return Err(CliError::Config(format!(
            "--trace only applies to ld-sim, not {}",
            cfg.command.name()
        )));
    }
    let mut csv = Vec::new();
    match &cfg.command {
        Command::Bounds(p) => write_gdof_rows(&mut csv, &[GdofPoint::evaluate(*p)])?,
        Command::Sweep { grid, beta, gamma } => {
            write_gdof_rows(&mut csv, &sweep(*grid, *beta, *gamma)?)?
        }
        Command::LdSim {
            params,
            allocation,
            blocks,
            runs,
        } => {
            let mut reports = Vec::with_capacity(*runs);
            let mut trace_out = trace_out;
            for seed in cfg.seed..cfg.seed + *runs as u64 {
                match trace_out.as_deref_mut() {
                    Some(w) => {
                        let (r, trace) = simulate_traced(params, allocation, *blocks, seed)?;
                        writeln!(w, "# {params}, seed {seed}\n{}", trace.render())
                            .map_err(|e| CliError::Runtime(format!("trace output: {e}")))?;
                        reports.push(r);
                    }
                    None => reports.push(simulate(params, allocation, *blocks, seed)?),
                }
            }
            write_sim_rows(&mut csv, &reports)?
        }
        Command::GaussOpt {
            channels,
            optimizer,
        } => {
            let rows = channels
                .iter()
                .map(|ch| {
                    let opt = optimize_powers(ch, optimizer)?;
                    Ok(GaussRow::new(ch, upper_bound_sumrate(ch)?, &opt))
                })
                .collect::<Result<Vec<_>, irclab::Error>>()?;
            write_gauss_rows(&mut csv, &rows)?
        }
        Command::GdofEst {
            pattern,
            snrs,
            optimizer,
        } => {
            let est = estimate_gdof(pattern, snrs, optimizer)?;
            write_estimate_rows(&mut csv, &estimate_rows(&est))?
        }
    }
    Ok(csv)
}

pub fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
