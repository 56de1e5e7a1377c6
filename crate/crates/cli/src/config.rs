use std::path::PathBuf;

use irclab::gaussian::{GaussianChannel, OptimizerConfig};
use irclab::gdof::{AlphaGrid, GdofParams};
use irclab::ld::{construct_allocation, search_allocation, toy_allocation, Allocation, LdParams};
use serde::Deserialize;

use crate::CliError;

pub const COMMANDS: [&str; 5] = ["bounds", "sweep", "ld-sim", "gauss-opt", "gdof-est"];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    command: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    bounds: Option<PatternSection>,
    sweep: Option<SweepSection>,
    #[serde(rename = "ld-sim")]
    ld_sim: Option<LdSimSection>,
    #[serde(rename = "gauss-opt")]
    gauss_opt: Option<GaussOptSection>,
    #[serde(rename = "gdof-est")]
    gdof_est: Option<GdofEstSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternSection {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    beta: f64,
    gamma: f64,
    alpha_start: f64,
    alpha_end: f64,
    alpha_step: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocationChoice {
    #[default]
    Construct,
    Toy,
    Search,
}

fn one() -> usize {
    1
}

fn default_budget() -> usize {
    5_000_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LdSimSection {
    /// `[n_d, n_c, n_r, n_s]`
    levels: [usize; 4],
    blocks: usize,
    #[serde(default)]
    allocation: AllocationChoice,
    #[serde(default = "one")]
    runs: usize,
    #[serde(default = "default_budget")]
    search_budget: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    h_d: f64,
    h_c: f64,
    h_r: f64,
    h_s: f64,
    power: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussOptSection {
    channel: Option<ChannelSection>,
    pattern: Option<PatternSection>,
    snr_db: Option<Vec<f64>>,
    #[serde(default)]
    optimizer: OptimizerConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GdofEstSection {
    pattern: PatternSection,
    snr_db: Vec<f64>,
    #[serde(default)]
    optimizer: OptimizerConfig,
}

/// A validated experiment, ready to run.
#[derive(Debug, Clone)]
pub enum Command {
    Bounds(GdofParams),
    Sweep {
        grid: AlphaGrid,
        beta: f64,
        gamma: f64,
    },
    LdSim {
        params: LdParams,
        allocation: Box<Allocation>,
        blocks: usize,
        runs: usize,
    },
    GaussOpt {
        channels: Vec<GaussianChannel>,
        optimizer: OptimizerConfig,
    },
    GdofEst {
        pattern: GdofParams,
        snrs: Vec<f64>,
        optimizer: OptimizerConfig,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds(_) => "bounds",
            Command::Sweep { .. } => "sweep",
            Command::LdSim { .. } => "ld-sim",
            Command::GaussOpt { .. } => "gauss-opt",
            Command::GdofEst { .. } => "gdof-est",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

fn required_keys(command: &str) -> &'static str {
    match command {
        "bounds" => "alpha, beta, gamma",
        "sweep" => "beta, gamma, alpha_start, alpha_end, alpha_step",
        "ld-sim" => "levels, blocks",
        "gauss-opt" => "channel = { h_d, h_c, h_r, h_s, power } or pattern = { alpha, beta, gamma } with snr_db",
        _ => "pattern = { alpha, beta, gamma }, snr_db",
    }
}

fn section<T>(s: Option<T>, command: &str) -> Result<T, CliError> {
    s.ok_or_else(|| {
        CliError::Config(format!(
            "command `{command}` needs a [{command}] table with keys: {}",
            required_keys(command)
        ))
    })
}

fn pattern(s: PatternSection) -> Result<GdofParams, CliError> {
    Ok(GdofParams::new(s.alpha, s.beta, s.gamma)?)
}

fn snrs_from_db(db: &[f64]) -> Vec<f64> {
    db.iter().map(|d| 10f64.powf(d / 10.0)).collect()
}

fn optimizer(cfg: OptimizerConfig) -> Result<OptimizerConfig, CliError> {
    cfg.validate()?;
    Ok(cfg)
}

fn ld_sim(s: LdSimSection) -> Result<Command, CliError> {
    let [n_d, n_c, n_r, n_s] = s.levels;
    let params = LdParams::new(n_d, n_c, n_r, n_s)?;
    if s.runs == 0 {
        return Err(CliError::Config("[ld-sim] runs must be at least 1".into()));
    }
    let allocation = match s.allocation {
        AllocationChoice::Toy => toy_allocation(),
        AllocationChoice::Construct => construct_allocation(&params)?,
        AllocationChoice::Search => {
            let found = search_allocation(&params, s.search_budget);
            found.best.ok_or_else(|| {
                CliError::Config(format!(
                    "no valid allocation found for {params} within {} candidates{}",
                    found.candidates,
                    if found.exhausted {
                        " (budget exhausted)"
                    } else {
                        ""
                    }
                ))
            })?
        }
    };
    Ok(Command::LdSim {
        params,
        allocation: Box::new(allocation),
        blocks: s.blocks,
        runs: s.runs,
    })
}

fn gauss_opt(s: GaussOptSection) -> Result<Command, CliError> {
    let channels = match (s.channel, s.pattern, s.snr_db) {
        (Some(c), None, None) => vec![GaussianChannel::new(c.h_d, c.h_c, c.h_r, c.h_s, c.power)?],
        (None, Some(p), Some(db)) if !db.is_empty() => {
            let g = pattern(p)?;
            snrs_from_db(&db)
                .into_iter()
                .map(|snr| GaussianChannel::from_exponents(&g, snr))
                .collect::<Result<_, _>>()?
        }
        _ => {
            return Err(CliError::Config(format!(
                "[gauss-opt] needs exactly one of: {}",
                required_keys("gauss-opt")
            )))
        }
    };
    Ok(Command::GaussOpt {
        channels,
        optimizer: optimizer(s.optimizer)?,
    })
}

/// Parses and validates a TOML run description.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let doc: Document = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let Some(name) = doc.command else {
        return Err(CliError::Config(format!(
            "missing required key `command` (one of {}) and its table of parameters",
            COMMANDS.join(", ")
        )));
    };
    let command = match name.as_str() {
        "bounds" => Command::Bounds(pattern(section(doc.bounds, &name)?)?),
        "sweep" => {
            let s = section(doc.sweep, &name)?;
            let grid = AlphaGrid::new(s.alpha_start, s.alpha_end, s.alpha_step);
            grid.values()?;
            GdofParams::new(1.0, s.beta, s.gamma)?;
            Command::Sweep {
                grid,
                beta: s.beta,
                gamma: s.gamma,
            }
        }
        "ld-sim" => ld_sim(section(doc.ld_sim, &name)?)?,
        "gauss-opt" => gauss_opt(section(doc.gauss_opt, &name)?)?,
        "gdof-est" => {
            let s = section(doc.gdof_est, &name)?;
            Command::GdofEst {
                pattern: pattern(s.pattern)?,
                snrs: snrs_from_db(&s.snr_db),
                optimizer: optimizer(s.optimizer)?,
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown command `{other}`, expected one of {}",
                COMMANDS.join(", ")
            )))
        }
    };
    Ok(RunConfig {
        command,
        seed: doc.seed.unwrap_or(0),
        out: doc.out,
    })
}
