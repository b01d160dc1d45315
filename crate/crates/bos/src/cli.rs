//! Argument parsing and command dispatch.
//!
//! Exit codes: 0 success, 1 usage or validation, 2 numerical failure. Errors
//! go to standard error as one JSON record.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{BoundaryArg, CliError, Format, PrecisionArg, RunConfig};
use crate::output::{emit, Record};
use crate::pipeline::{crosscheck, spectrum_rows, sweep};

#[derive(Parser, Debug)]
#[command(name = "bos", version, about = "Eigenvalues of the operator A+ by several independent routes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of one truncated section.
    Spectrum(SpectrumArgs),
    /// Matrix, shooting, Sturm-Liouville and connection routes side by side.
    Crosscheck(CrossArgs),
    /// Spectra over a list of epsilon values plus a long-format table.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Model parameter in (0, 2); repeat or separate with commas.
    #[arg(long = "epsilon", short = 'e', value_delimiter = ',', required = true, allow_negative_numbers = true)]
    epsilon: Vec<f64>,
    /// Truncation size N.
    #[arg(long = "size", short = 'N', default_value_t = 1000)]
    size: usize,
    /// Stability tolerance for matching N against 2N.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::DoubleDouble)]
    precision: PrecisionArg,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Truncated)]
    boundary: BoundaryArg,
    /// Skip the 2N section; every row is then reported unstable.
    #[arg(long)]
    no_filter: bool,
}

#[derive(Args, Debug)]
struct CrossArgs {
    #[command(flatten)]
    common: Common,
    /// Galerkin dimension K.
    #[arg(long = "galerkin", short = 'K', default_value_t = 200)]
    galerkin: usize,
    /// Largest accepted cross-route relative discrepancy and |Im λ|.
    #[arg(long, default_value_t = 1e-6)]
    gate: f64,
    /// Number of eigenvalues compared.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Accept 1/ε ∈ Z (the connection route then uses logarithmic solutions).
    #[arg(long)]
    allow_resonant: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Asymptotic)]
    boundary: BoundaryArg,
}

fn base(c: Common) -> RunConfig {
    RunConfig {
        epsilons: c.epsilon,
        size: c.size,
        tol: c.tol,
        format: c.format,
        out: c.out,
        precision: c.precision.into(),
        ..RunConfig::default()
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "{}", e.record());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Spectrum(a) => {
            let cfg = RunConfig {
                boundary: a.boundary.into(),
                filter: !a.no_filter,
                ..base(a.common)
            };
            cfg.validate(false)?;
            let mut rows = Vec::new();
            for &e in &cfg.epsilons {
                rows.extend(spectrum_rows(e, &cfg)?);
            }
            write(&rows, &cfg, cfg.out.as_deref())
        }
        Command::Crosscheck(a) => {
            let cfg = RunConfig {
                galerkin: a.galerkin,
                gate: a.gate,
                count: a.count,
                allow_resonant: a.allow_resonant,
                ..base(a.common)
            };
            cfg.validate(true)?;
            let mut records = Vec::new();
            let mut failure = None;
            for &e in &cfg.epsilons {
                let out = crosscheck(e, &cfg)?;
                records.extend(out.records);
                if failure.is_none() {
                    failure = out.failure.map(|(row, msg)| CliError::numerical(msg, e, row));
                }
            }
            write(&records, &cfg, cfg.out.as_deref())?;
            failure.map_or(Ok(()), Err)
        }
        Command::Sweep(a) => {
            let cfg = RunConfig { boundary: a.boundary.into(), ..base(a.common) };
            cfg.validate(false)?;
            let out = sweep(&cfg);
            write(&out.aggregate, &cfg, cfg.out.as_deref())?;
            if let Some(path) = &cfg.out {
                write(&out.spectra, &cfg, Some(&sibling(path, "spectra", cfg.format)))?;
                write(&out.status, &cfg, Some(&sibling(path, "status", cfg.format)))?;
            }
            match out.status.iter().find(|s| s.status != "ok") {
                Some(s) => Err(CliError::numerical(s.message.clone(), s.epsilon, None)),
                None => Ok(()),
            }
        }
    }
}

/// `dir/name.csv` → `dir/name.<tag>.csv`.
fn sibling(path: &Path, tag: &str, format: Format) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.{}", format.extension()))
}

fn write<T: Record>(rows: &[T], cfg: &RunConfig, path: Option<&Path>) -> Result<(), CliError> {
    emit(rows, cfg.format, path).map_err(|e| {
        let target = path.map_or_else(|| "standard output".to_string(), |p| p.display().to_string());
        CliError::Usage(format!("cannot write {target}: {e}"))
    })
}
