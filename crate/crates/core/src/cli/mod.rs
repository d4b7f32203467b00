//! The `polariton` command-line tool.
//!
//! ```text
//! polariton --config sodium.cfg dispersion --samples 101 --kmax 0.1
//! polariton --config sodium.cfg --format json thresholds
//! polariton --config sodium.cfg trap --target-tc "300 K" --n-particles 1e6
//! polariton --config sodium.cfg sweep --param Delta --from -5 --to 5 --steps 11 --target masses
//! ```
//!
//! Exit status is 0 on success, 1 for usage and config errors and 2 when the
//! physics lands outside the regime of interest (weak coupling, no well).

pub mod commands;
pub mod config;
pub mod sweep;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::quantities::{Dimension, UnitSystem};
use commands::{evaluate, Inputs, Report, Target, EXIT_USAGE};
use config::{ConfigError, OutputFormat, RunConfig};
use sweep::{run_sweep, Scale, SweepSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(ConfigError::Physics(e))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "polariton",
    version,
    about = "Cavity-polariton dispersion and condensation thresholds"
)]
pub struct Cli {
    /// Run configuration (`key = value` lines)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file, `-` for standard output
    #[arg(long, global = true, default_value = "-")]
    pub out: String,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true, value_parser = parse_units)]
    pub units: Option<UnitSystem>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_units(s: &str) -> Result<UnitSystem, String> {
    s.parse()
        .map_err(|e: crate::quantities::UnitError| e.to_string())
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GridArgs {
    /// Number of k_par samples, endpoints included
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Largest k_par as a fraction of k_perp
    #[arg(long, default_value_t = crate::dispersion::DEFAULT_PARAXIAL_BOUND)]
    pub kmax: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TrapArgs {
    /// Target condensation temperature with unit, e.g. "300 K"
    #[arg(long, allow_hyphen_values = true)]
    pub target_tc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_particles: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Strong/weak coupling check
    CheckCoupling,
    /// Branch energies and weights along k_par
    Dispersion(GridArgs),
    /// Hopfield weights along k_par
    Hopfield(GridArgs),
    /// Branch effective masses
    Masses,
    /// Degeneracy, KT and trapped-BEC temperatures
    Thresholds,
    /// Trap frequency and lens profile for a target T_c
    Trap(TrapArgs),
    /// Repeat a command over a range of one config value
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Config key to vary
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub scale: Scale,
    #[arg(long, value_enum)]
    pub target: Target,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
}

/// Result of one invocation, captured for testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match result {
        Ok((code, text)) => {
            if cli.out == "-" {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                match std::fs::write(&cli.out, text) {
                    Ok(()) => Outcome {
                        code,
                        stdout: String::new(),
                        stderr: String::new(),
                    },
                    Err(e) => Outcome::failure(CliError::Io(e)),
                }
            }
        }
        Err(e) => Outcome::failure(e),
    }
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::CheckCoupling => "check-coupling".into(),
        Command::Dispersion(_) => "dispersion".into(),
        Command::Hopfield(_) => "hopfield".into(),
        Command::Masses => "masses".into(),
        Command::Thresholds => "thresholds".into(),
        Command::Trap(_) => "trap".into(),
        Command::Sweep(s) => format!("sweep {} -> {}", s.param, s.target.name()),
    }
}

fn inputs(
    grid: Option<GridArgs>,
    trap: Option<&TrapArgs>,
    units: UnitSystem,
) -> Result<Inputs, CliError> {
    let grid = grid.unwrap_or(GridArgs {
        samples: 201,
        kmax: crate::dispersion::DEFAULT_PARAXIAL_BOUND,
    });
    let target_tc = trap
        .and_then(|t| t.target_tc.as_deref())
        .map(|s| crate::quantities::parse_quantity(s, Dimension::TEMPERATURE))
        .transpose()
        .map_err(|e| CliError::Usage(format!("--target-tc: {e}")))?;
    Ok(Inputs {
        samples: grid.samples,
        k_max: grid.kmax,
        target_tc,
        n_particles: trap.and_then(|t| t.n_particles),
        units,
    })
}

fn execute(cli: &Cli) -> Result<(i32, String), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let format = cli.format.or(cfg.format).unwrap_or(OutputFormat::Csv);
    let units = cli.units.or(cfg.units).unwrap_or(UnitSystem::Cgs);
    let (report, bare_json) = match &cli.command {
        Command::CheckCoupling => (
            evaluate(Target::CheckCoupling, &cfg, &inputs(None, None, units)?)?,
            false,
        ),
        Command::Dispersion(g) => (
            evaluate(Target::Dispersion, &cfg, &inputs(Some(*g), None, units)?)?,
            false,
        ),
        Command::Hopfield(g) => (
            evaluate(Target::Hopfield, &cfg, &inputs(Some(*g), None, units)?)?,
            false,
        ),
        Command::Masses => (
            evaluate(Target::Masses, &cfg, &inputs(None, None, units)?)?,
            false,
        ),
        Command::Thresholds => (
            evaluate(Target::Thresholds, &cfg, &inputs(None, None, units)?)?,
            false,
        ),
        Command::Trap(t) => {
            let inp = inputs(None, Some(t), units)?;
            (
                evaluate(Target::Trap, &cfg, &inp)?,
                cli.format.or(cfg.format) != Some(OutputFormat::Csv),
            )
        }
        Command::Sweep(s) => {
            let spec = SweepSpec::parse(&cfg, &s.param, &s.from, &s.to, s.steps, s.scale)?;
            let inp = inputs(Some(s.grid), Some(&s.trap), units)?;
            (run_sweep(&cfg, &spec, s.target, &inp)?, false)
        }
    };
    let Report {
        mut table,
        code,
        record,
    } = report;
    if bare_json {
        // A strict JSON document has no room for comment metadata.
        let record = record.expect("trap emits a record");
        let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
        text.push('\n');
        return Ok((code, text));
    }
    let mut comments = vec![
        format!("polariton {}", env!("CARGO_PKG_VERSION")),
        format!("command: {}", command_name(&cli.command)),
        format!("config_sha256: {}", cfg.hash),
        format!(
            "units: {}",
            match units {
                UnitSystem::Cgs => "cgs",
                UnitSystem::Si => "si",
            }
        ),
    ];
    comments.append(&mut table.comments);
    table.comments = comments;
    Ok((code, table.render(format)))
}
