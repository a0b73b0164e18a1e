//! The `usd-attack` command-line front end.
//!
//! Every subcommand produces a [`Document`] that is written as CSV (default)
//! or JSON to standard output or to `--output`. A relative `--output` path is
//! resolved against `$USD_ATTACK_OUTPUT_DIR` when that variable is set.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when a parameter is
//! outside its domain.

mod commands;
pub mod document;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use document::{format_sig, round_sig, Cell, Document};

/// Environment variable naming the default directory for `--output` files.
pub const OUTPUT_DIR_ENV: &str = "USD_ATTACK_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(
    name = "usd-attack",
    version,
    about = "USD attack analysis for BB84 with weak coherent pulses",
    arg_required_else_help = true
)]
pub struct CommandRequest {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Fock,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Geometric,
    Paper,
}

/// Inclusive sweep over the primary variable.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct SweepArgs {
    /// First grid value.
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Last grid value (inclusive).
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Logarithmic spacing.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Squared canonical coefficients |c_j|^2 (coherent states or n-photon subspaces).
    Coefficients {
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        /// Tabulate the n-photon conditional coefficients instead.
        #[arg(long)]
        fock: bool,
        /// Largest photon number with --fock.
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Optimal USD probability; --sweep tabulates both source models.
    Pd {
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, value_enum, default_value_t = ModelArg::Fock)]
        model: ModelArg,
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        range: SweepArgs,
    },
    /// Number-state curve and working-point curve samples.
    Curves {
        #[arg(long, allow_negative_numbers = true)]
        eta_b: f64,
        /// Mean photon number fixing P_D (phase-averaged source).
        #[arg(long, allow_negative_numbers = true, conflicts_with = "p_d")]
        mu: Option<f64>,
        /// Use this discrimination probability directly.
        #[arg(long, allow_negative_numbers = true)]
        p_d: Option<f64>,
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Insecurity polygon with both curves (and optionally a working point).
    Region {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        eta_b: f64,
        /// Adds the working point at this line transmittance.
        #[arg(long, allow_negative_numbers = true)]
        eta_l: Option<f64>,
        /// Polygon truncation: stop once (1 - eta_b)^N < tol.
        #[arg(long, allow_negative_numbers = true, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Security verdict for one parameter triple.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        eta_l: f64,
        #[arg(long, allow_negative_numbers = true)]
        eta_b: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Geometric)]
        mode: ModeArg,
    },
    /// Verdicts over a (mu, eta_l) grid, or the boundary curves alone.
    Map {
        #[command(flatten)]
        mu: SweepArgs,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1e-4)]
        eta_l_from: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        eta_l_to: f64,
        #[arg(long, default_value_t = 50)]
        eta_l_steps: usize,
        #[arg(long)]
        eta_l_log: bool,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        eta_b: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Geometric)]
        mode: ModeArg,
        /// Emit the necessary-condition threshold on eta_l * eta_b versus mu.
        #[arg(long, conflicts_with = "small_etab")]
        necessary: bool,
        /// Emit the small-eta_b boundary curves versus mu.
        #[arg(long)]
        small_etab: bool,
    },
    /// F criterion versus mu, with its root.
    Fscan {
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
        eta_l: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        eta_b: f64,
        #[command(flatten)]
        range: SweepArgs,
    },
    /// Beamsplitting-attack figures of merit.
    Beamsplit {
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        /// Total system transmission.
        #[arg(long, allow_negative_numbers = true)]
        eta: f64,
        #[command(flatten)]
        range: SweepArgs,
    },
    /// Beamsplitting gain versus USD verdict at one working point.
    Compare {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        eta_l: f64,
        #[arg(long, allow_negative_numbers = true)]
        eta_b: f64,
    },
    /// Monte Carlo check of the click probabilities.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
        eta_l: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        eta_b: f64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Eve resends this many photons after each successful discrimination.
        #[arg(long, conflicts_with = "resend_weights")]
        resend: Option<u32>,
        /// Resend mixture as N:weight pairs, e.g. 1:0.25,2:0.75.
        #[arg(long)]
        resend_weights: Option<String>,
        /// Fraction of pulses Eve attacks (default 1 when a resend law is given).
        #[arg(long, allow_negative_numbers = true)]
        attack_fraction: Option<f64>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Runs a parsed request and returns the document it produces.
pub fn execute(request: &CommandRequest) -> Result<Document, CliError> {
    commands::dispatch(&request.command)
}

/// Writes `doc` in the requested format to the requested destination.
pub fn emit<W: Write>(request: &CommandRequest, doc: &Document, stdout: &mut W) -> Result<(), CliError> {
    match &request.output {
        Some(path) => {
            let path = match std::env::var_os(OUTPUT_DIR_ENV) {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path.clone(),
            };
            let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_doc(request.format, doc, file)
        }
        None => write_doc(request.format, doc, stdout),
    }
}

fn write_doc<W: Write>(format: Format, doc: &Document, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => doc.write_csv(out)?,
        Format::Json => doc.write_json(out)?,
    }
    Ok(())
}

/// Full command-line entry point: parse, execute, emit. Returns the exit code.
pub fn run<I, T, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let request = match CommandRequest::try_parse_from(args) {
        Ok(r) => r,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&request).and_then(|doc| emit(&request, &doc, stdout)) {
        Ok(()) => 0,
        // A closed downstream pipe (e.g. `| head`) is not a failure.
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
