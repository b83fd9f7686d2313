//! Argument definitions, dispatch and error reporting.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dicke_core::{DickeError, Parity};
use serde::Serialize;

use crate::commands;
use crate::config::expand_args;
use crate::document::{Document, Format};

/// Finite-N Dicke model figure data.
///
/// Frequencies are in units of the cavity field frequency, which is fixed
/// to one. Every command writes a table with a `#` metadata header (CSV) or
/// the same fields as one JSON object.
#[derive(Debug, Parser)]
#[command(name = "dicke-lab", version)]
pub struct Cli {
    /// Worker threads for inner scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical coupling γ_c = √ω_A / 2 across a range of ω_A.
    Separatrix(SeparatrixArgs),
    /// (θ, q/√N) points from each method next to the closed-form curve.
    UniversalCurve(UniversalArgs),
    /// q/√N against γ for each method.
    QuadratureScan(QuadratureArgs),
    /// γ_c over a ladder of j and a power-law fit of γ_c − 1/2.
    Exponent(ExponentArgs),
    /// Excited-atom population with and without the rotating-wave terms.
    Dynamics(DynamicsArgs),
    /// Hamiltonian matrix in one truncation.
    Matrix(MatrixArgs),
    /// Writes the whole figure-data suite into a directory.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl FormatArg {
    pub fn extension(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorArg {
    Even,
    Odd,
}

impl From<SectorArg> for Parity {
    fn from(s: SectorArg) -> Self {
        match s {
            SectorArg::Even => Parity::Even,
            SectorArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Cs,
    Sas,
    Exact,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeparatrixArgs {
    #[arg(long, default_value_t = 0.125)]
    pub omega_a_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub omega_a_max: f64,
    #[arg(long, default_value_t = 32)]
    pub omega_a_steps: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadratureArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega_a: f64,
    #[arg(long, default_value_t = 20)]
    pub n_atoms: u32,
    #[arg(long, default_value_t = 0.3)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 71)]
    pub gamma_steps: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cs,sas,exact")]
    pub method: Vec<MethodArg>,
    /// Parity sectors for the sas and exact methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "even,odd")]
    pub sector: Vec<SectorArg>,
    /// Energy convergence target for exact ground states.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 20_000)]
    pub nu_max_cap: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UniversalArgs {
    #[command(flatten)]
    pub scan: QuadratureArgs,
    /// Points on the closed-form curve.
    #[arg(long, default_value_t = 61)]
    pub theta_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExponentArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "even")]
    pub sector: SectorArg,
    #[arg(long, default_value_t = 1.0)]
    pub omega_a: f64,
    /// Comma list and/or `start:stop:step` ranges of half-integer j.
    #[arg(long)]
    pub j_list: Option<String>,
    #[arg(long, default_value_t = 1e-4)]
    pub delta_gamma: f64,
    /// Peak or swap location tolerance (default 1e-5 exact, 1e-8 sas).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub nu_max_cap: u32,
    #[arg(long, default_value_t = 21)]
    pub grid_points: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DynamicsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega_a: f64,
    #[arg(long, default_value_t = 1)]
    pub n_atoms: u32,
    /// Atomic splitting ω_A/N in units of Ω; sets γ unless --gamma is given.
    #[arg(long, default_value_t = 1.0)]
    pub rabi_ratio: f64,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Time span in units of 1/Ω.
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[arg(long, default_value_t = 60)]
    pub nu_max: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Json,
    Mtx,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatrixArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega_a: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2)]
    pub n_atoms: u32,
    #[arg(long, default_value_t = 10)]
    pub nu_max: u32,
    #[arg(long, value_enum)]
    pub sector: Option<SectorArg>,
    /// Keep only the rotating-wave coupling.
    #[arg(long)]
    pub rwa: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mtx")]
    #[serde(skip)]
    pub format: MatrixFormat,
}

#[derive(Debug, Clone, Args)]
pub struct ReproArgs {
    /// Directory for the data files.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

/// Metadata entries for every serializable argument, keyed by flag name.
pub fn describe(args: &impl Serialize, doc: &mut Document) {
    fn walk(v: &serde_json::Value, doc: &mut Document) {
        if let serde_json::Value::Object(map) = v {
            for (k, v) in map {
                if v.is_object() {
                    walk(v, doc);
                } else {
                    doc.meta(&k.replace('_', "-"), plain(v));
                }
            }
        }
    }
    fn plain(v: &serde_json::Value) -> String {
        match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(","),
            serde_json::Value::Null => "-".to_string(),
            other => other.to_string(),
        }
    }
    if let Ok(v) = serde_json::to_value(args) {
        walk(&v, doc);
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run(args: Vec<OsString>) -> Result<()> {
    let args = expand_args(args).map_err(|e| Usage(format!("{e:#}")))?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Usage(e.to_string().trim_end().to_string()).into()),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Usage("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Matrix(a) => commands::matrix(a),
        Command::Repro(a) => commands::repro(a),
        other => {
            let (doc, output) = commands::compute(other)?;
            write_document(&doc, output.format.into(), output.out.as_deref())
        }
    }
}

pub fn write_document(doc: &Document, format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = doc.to_bytes(format)?;
    write_bytes(&bytes, out)
}

pub fn write_bytes(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => {
            let mut so = io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
        }
    }
    Ok(())
}

/// Command-line misuse; reported with kind `usage`.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Rejected input that passed parsing, such as an empty range.
#[derive(Debug)]
pub struct InvalidInput(pub String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

pub fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<DickeError>() {
            return e.kind();
        }
        if cause.is::<Usage>() {
            return "usage";
        }
        if cause.is::<InvalidInput>() {
            return "invalid_input";
        }
        if cause.is::<io::Error>() || cause.is::<csv::Error>() || cause.is::<serde_json::Error>() {
            return "io";
        }
    }
    "internal"
}

/// One-line JSON error record.
pub fn error_line(err: &anyhow::Error) -> String {
    serde_json::json!({
        "error": {
            "kind": error_kind(err),
            "message": format!("{err:#}"),
        }
    })
    .to_string()
}

/// Entry point used by the binary.
pub fn main_with(args: Vec<OsString>) -> ExitCode {
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            if error_kind(&e) == "usage" {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
