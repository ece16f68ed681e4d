//! Command-line front end: problem files in, JSON reports out.
//!
//! Exit codes: 0 when every verdict passes, 2 when some verdict fails,
//! 1 on malformed or invalid input (with a one-line JSON error on stderr).

pub mod problem;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex;

use crate::error::Error;
use crate::maxwell::{self, GridSpec};
use problem::{ProblemError, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stabcert", version, about = "Certify and audit exponential decay of damped block systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the stability certificate and audit it against dense oracles.
    Certify {
        problem: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Seed for the random initial data of the trajectory audit.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Resolvent norms along the vertical line Re z = abscissa.
    Sweep {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        abscissa: f64,
        #[arg(long, default_value_t = 50.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate the evolution from admissible initial data.
    Simulate {
        problem: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = 801)]
        samples: usize,
        /// JSON file `{"u0": [[re, im], ...]}` with the full initial state `(u0, v0)`.
        #[arg(long)]
        u0: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the range/kernel frames, elimination transforms and Schur block at z.
    Reduce {
        problem: PathBuf,
        /// Complex shift as `RE,IM`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a periodic-grid Maxwell problem file.
    MaxwellGen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Failure of a subcommand before any verdict could be formed.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Pipeline(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> String {
        match self {
            CliError::Problem(p) => p.kind(),
            CliError::Pipeline(e) => error_kind(e).into(),
            CliError::Usage(_) => "Usage".into(),
            CliError::Write { .. } => "Io".into(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Pipeline(Error::CertificateFailure { .. }) => EXIT_VERDICT,
            _ => EXIT_INPUT,
        }
    }
}

/// Variant name of a pipeline error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::NonFinite(_) => "NonFinite",
        Error::NotHermitian(_) => "NotHermitian",
        Error::NotCoercive { .. } => "NotCoercive",
        Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
        Error::InvalidTolerance { .. } => "InvalidTolerance",
        Error::HalfPlaneViolation { .. } => "HalfPlaneViolation",
        Error::SingularKernelBlock => "SingularKernelBlock",
        Error::SingularReducedBlock => "SingularReducedBlock",
        Error::NotInRange { .. } => "NotInRange",
        Error::ParameterOutOfRange { .. } => "ParameterOutOfRange",
        Error::DegenerateProblem(_) => "DegenerateProblem",
        Error::ZeroRangeOperator => "ZeroRangeOperator",
        Error::CertificateFailure { .. } => "CertificateFailure",
        Error::Singular { .. } => "Singular",
        Error::Underflow => "Underflow",
        Error::TooFewSamples { .. } => "TooFewSamples",
        Error::ZeroFrequency => "ZeroFrequency",
        Error::DegenerateShift => "DegenerateShift",
        Error::NotInvertible(_) => "NotInvertible",
        Error::SingularBlock(_) => "SingularBlock",
        Error::GridTooLarge { .. } => "GridTooLarge",
        Error::InvalidGrid(_) => "InvalidGrid",
        Error::NoConvergence => "NoConvergence",
    }
}

/// Parses `RE,IM` (a bare `RE` means zero imaginary part).
pub fn parse_complex(s: &str) -> Result<Complex<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse complex number {s:?}, expected RE,IM"));
    let mut parts = s.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex::new(re, im))
}

pub(crate) fn write_output(path: Option<&Path>, json: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, json).map_err(|source| CliError::Write {
            path: p.display().to_string(),
            source,
        }),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn maxwell_gen(
    n: usize,
    h: f64,
    eps: f64,
    mu: f64,
    sigma: f64,
    output: &Path,
) -> Result<i32, CliError> {
    let spec = GridSpec::new(n, h)?;
    let (k, _) = maxwell::curl_operators::<f64>(&spec, maxwell::dense_limit_from_env())?;
    let diag = |v: f64| maxwell_diagonal(v, &spec);
    let file = ProblemFile::from_matrices(&diag(eps), &diag(mu), &diag(sigma), &k);
    write_output(Some(output), &file.to_json())?;
    Ok(EXIT_OK)
}

fn maxwell_diagonal(v: f64, spec: &GridSpec) -> crate::scalar::ComplexMatrix<f64> {
    let rows = spec.field_dim();
    nalgebra::DMatrix::from_diagonal_element(rows, rows, Complex::new(v, 0.0))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Certify {
            problem,
            output,
            seed,
        } => {
            let file = ProblemFile::read(&problem)?;
            let rep = report::certify(&file, seed)?;
            write_output(output.as_deref(), &rep.to_json())?;
            Ok(exit_for(rep.all_pass))
        }
        Command::Sweep {
            problem,
            abscissa,
            lambda_max,
            points,
            output,
        } => {
            let file = ProblemFile::read(&problem)?;
            let rep = report::sweep(&file, abscissa, lambda_max, points)?;
            write_output(output.as_deref(), &rep.to_json())?;
            Ok(exit_for(rep.all_pass))
        }
        Command::Simulate {
            problem,
            t_end,
            samples,
            u0,
            seed,
            output,
        } => {
            let file = ProblemFile::read(&problem)?;
            let initial = match u0 {
                Some(p) => Some(report::read_initial_state(&p)?),
                None => None,
            };
            let rep = report::simulate(&file, t_end, samples, initial, seed)?;
            write_output(output.as_deref(), &rep.to_json())?;
            Ok(exit_for(rep.all_pass))
        }
        Command::Reduce { problem, z, output } => {
            let file = ProblemFile::read(&problem)?;
            let z = parse_complex(&z)?;
            let rep = report::reduce(&file, z)?;
            write_output(output.as_deref(), &rep.to_json())?;
            Ok(exit_for(rep.all_pass))
        }
        Command::MaxwellGen {
            n,
            h,
            eps,
            mu,
            sigma,
            output,
        } => maxwell_gen(n, h, eps, mu, sigma, &output),
    }
}

fn exit_for(all_pass: bool) -> i32 {
    if all_pass {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

/// Runs the CLI on explicit arguments (the first one is the program name)
/// and returns the process exit code.
pub fn run_from<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let line = serde_json::json!({ "error": "Usage", "message": e.kind().to_string() });
            eprintln!("{line}");
            return EXIT_INPUT;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            e.exit_code()
        }
    }
}
