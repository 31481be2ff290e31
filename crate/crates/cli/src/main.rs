//! `slipline-lab`: sample catalog fields, trace slip lines, envelopes and
//! streamlines, and run the verification suites.

// `!(a > b)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use slipline_core::characteristics::Family;
use slipline_core::residuals::Region;

#[derive(Parser, Debug)]
#[command(name = "slipline-lab", version, about = "Slip-line fields and velocity solutions of plane perfect plasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample sigma, theta and the stress components on a lattice.
    Sample(Common),
    /// Trace slip lines of one or both families from seeds across the region.
    Sliplines(Common),
    /// Emit the envelopes of the slip lines.
    Envelope(EnvelopeArgs),
    /// Trace streamlines of a velocity field.
    Streamlines(Common),
    /// Sample a velocity field and its dissipation on a lattice.
    Velocity(Common),
    /// Run residual, structure-constant, invariance and boundary suites.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Documented closed-form envelopes.
    Closed,
    /// Zeros of the Jacobian of the closed-form slip-line net.
    Numeric,
}

#[derive(Args, Debug)]
struct Common {
    /// Catalog name, e.g. `prandtl`, `nadai_two_circles`, `revuzhenko`, `yakhno`.
    #[arg(long)]
    solution: String,
    /// Parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    /// `x0,x1,y0,y1`, or `r0,r1,phi0,phi1` with `--polar`.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    #[arg(long)]
    polar: bool,
    /// Lattice points per axis, or number of seeds for traced curves.
    #[arg(long)]
    n: Option<usize>,
    /// Integration step for traced curves.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Maximum arc length traced in each direction from a seed.
    #[arg(long, default_value_t = 2.0)]
    length: f64,
    /// Restrict to one slip-line family.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    family: Option<u8>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Yield stress in shear, merged into the parameters.
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Args, Debug)]
struct EnvelopeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run every suite.
    #[arg(long, conflicts_with = "solution")]
    all: bool,
    /// Verify a single catalog solution.
    #[arg(long, required_unless_present = "all")]
    solution: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    #[arg(long)]
    polar: bool,
    /// Inject a defect of this size before verifying.
    #[arg(long, requires = "solution")]
    perturb: Option<f64>,
    /// Lattice points per axis of the residual sweeps.
    #[arg(long)]
    n: Option<usize>,
    /// Seed for the random structure-constant points.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<f64>,
    /// Report JSON; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A verification check failed (exit 1).
    Verification(String),
    /// Malformed request (exit 2).
    Config(String),
    /// The request is valid but nothing lies in the solution's domain (exit 3).
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Config(_) => 2,
            Failure::Domain(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Config(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<slipline_core::Error> for Failure {
    fn from(e: slipline_core::Error) -> Self {
        if e.is_domain_error() || matches!(e, slipline_core::Error::NoEnvelope(_) | slipline_core::Error::NoSignChange) {
            Failure::Domain(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Parses `--params`, merging `--k` when given.
pub fn parse_params(raw: Option<&str>, k: Option<f64>) -> CliResult<Value> {
    let mut v: Value = match raw {
        Some(s) => serde_json::from_str(s).map_err(|e| Failure::Config(format!("--params is not valid JSON: {e}")))?,
        None => Value::Object(Default::default()),
    };
    if let Some(k) = k {
        match &mut v {
            Value::Object(m) => {
                m.insert("k".into(), k.into());
            }
            _ => return Err(Failure::Config("--params must be a JSON object".into())),
        }
    }
    if !v.is_object() {
        return Err(Failure::Config("--params must be a JSON object".into()));
    }
    Ok(v)
}

pub fn parse_region(raw: Option<&str>, polar: bool) -> CliResult<Option<Region>> {
    let Some(raw) = raw else {
        if polar {
            return Err(Failure::Config("--polar needs --region".into()));
        }
        return Ok(None);
    };
    let vals: Vec<f64> = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Config(format!("--region: {e}")))?;
    let [a0, a1, b0, b1] = vals[..] else {
        return Err(Failure::Config(format!("--region needs 4 numbers, got {}", vals.len())));
    };
    if !vals.iter().all(|v| v.is_finite()) || !(a0 < a1 && b0 < b1) {
        return Err(Failure::Config("--region bounds must be finite and increasing".into()));
    }
    if polar && a0 <= 0.0 {
        return Err(Failure::Config("--region: polar radii must be positive".into()));
    }
    Ok(Some(if polar { Region::polar(a0, a1, b0, b1) } else { Region::cartesian(a0, a1, b0, b1) }))
}

pub fn families(choice: Option<u8>) -> CliResult<Vec<Family>> {
    match choice {
        None => Ok(vec![Family::First, Family::Second]),
        Some(i) => Ok(vec![Family::from_index(i)?]),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SLIPLINE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Config(format!("SLIPLINE_LAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Sample(c) => commands::sample(&c),
        Command::Sliplines(c) => commands::sliplines(&c),
        Command::Envelope(e) => commands::envelope(&e.common, e.method),
        Command::Streamlines(c) => commands::streamlines(&c),
        Command::Velocity(c) => commands::velocity(&c),
        Command::Verify(v) => commands::verify(&v),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("slipline-lab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
