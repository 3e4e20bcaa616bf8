//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 I/O or parse error,
//! 3 violated mathematical precondition.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::constructions::{
    column_unitaries, contraction_unitaries, midpoint_unitaries, theorem1_unitaries, CertifiedInstance,
    IsometricColumn, Provenance, UnitaryPair,
};
use crate::convex::ConvexFunction;
use crate::error::Error;
use crate::fuzz::{run_campaign, RandomSpec, Target};
use crate::io::{write_text, IoError, MatrixFile, MatrixKind};
use crate::linalg::hermitian_eig;
use crate::tolerance::ToleranceConfig;
use crate::verifiers::{certificate_check, fan_sums_check, staircase_check, weyl_check, CheckReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "opjensen", version, about = "Certificate unitaries and checks for matrix Jensen inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// f(A_𝓔) against f(A)_𝓔; inputs: A, W
    Thm1,
    /// f(Z*AZ) against Z*f(A)Z; inputs: A, Z
    Contraction,
    /// f(Σ Zᵢ*AᵢZᵢ) against Σ Zᵢ*f(Aᵢ)Zᵢ; inputs: A₁ Z₁ A₂ Z₂ …
    Column,
    /// f((A+B)/2) against (f(A)+f(B))/2; inputs: A, B
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Input matrix or certificate files (repeatable)
    #[arg(short = 'i', long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Tolerance override: a number sets the order tolerance, `key=value` sets
    /// herm, unitary, eig, order or cvx (repeatable)
    #[arg(long = "tol")]
    pub tol: Vec<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a certified unitary pair
    Construct {
        mode: Mode,
        /// Function spec, e.g. `abs` or `power_p:p=1.5`
        #[arg(long = "fn")]
        function: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a certificate file, or x y [U V] matrix files
    Verify {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded campaign
    Fuzz {
        #[arg(long)]
        target: Target,
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long = "sub", default_value_t = 2)]
        sub: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Omit wall time so that repeated runs are byte-identical
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Io(IoError),
    Math(Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Usage(_) => EXIT_IO,
            CliError::Math(e) if e.is_precondition() => EXIT_PRECONDITION,
            CliError::Math(Error::CertificateFailed { .. } | Error::NoConvergence { .. }) => EXIT_VERIFY_FAILED,
            CliError::Math(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Math(e) => write!(f, "{e}"),
            CliError::Usage(e) => write!(f, "{e}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn tolerances(overrides: &[String]) -> CliResult<ToleranceConfig> {
    let mut tol = ToleranceConfig::DEFAULT;
    for o in overrides {
        let (key, value) = o.split_once('=').unwrap_or(("order", o.as_str()));
        let value: f64 = value.trim().parse().map_err(|_| CliError::Usage(format!("bad tolerance `{o}`")))?;
        tol.set(key.trim(), value).map_err(CliError::Usage)?;
    }
    Ok(tol)
}

/// Construction output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub x: MatrixFile,
    pub y: MatrixFile,
    pub u: MatrixFile,
    pub v: MatrixFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_margin: Option<f64>,
    #[serde(default)]
    pub x_eigenvalues: Vec<f64>,
    #[serde(default)]
    pub y_eigenvalues: Vec<f64>,
    #[serde(default)]
    pub checks: Vec<CheckReport>,
}

impl CertificateFile {
    pub fn from_instance(inst: &CertifiedInstance, tol: &ToleranceConfig) -> crate::error::Result<Self> {
        let t = tol.order;
        Ok(CertificateFile {
            x: MatrixFile::hermitian(&inst.x),
            y: MatrixFile::hermitian(&inst.y),
            u: MatrixFile::from_matrix(inst.pair.u.matrix(), Some(MatrixKind::Unitary)),
            v: MatrixFile::from_matrix(inst.pair.v.matrix(), Some(MatrixKind::Unitary)),
            meta: Some(inst.meta.clone()),
            certificate_margin: Some(inst.meta.certificate_margin),
            x_eigenvalues: hermitian_eig(&inst.x)?.eigenvalues,
            y_eigenvalues: hermitian_eig(&inst.y)?.eigenvalues,
            checks: vec![
                staircase_check(&inst.x, &inst.y, t)?,
                fan_sums_check(&inst.x, &inst.y, t)?,
                weyl_check(&inst.x, &inst.y, t)?,
            ],
        })
    }
}

fn load_all(paths: &[PathBuf]) -> CliResult<Vec<MatrixFile>> {
    paths.iter().map(|p| MatrixFile::load(p).map_err(CliError::from)).collect()
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn expect_inputs(files: &[MatrixFile], n: usize, what: &str) -> CliResult<()> {
    if files.len() != n {
        return Err(CliError::Usage(format!("{what} needs {n} inputs, got {}", files.len())));
    }
    Ok(())
}

pub fn cmd_construct(mode: Mode, function: &str, common: &Common) -> CliResult<i32> {
    let tol = tolerances(&common.tol)?;
    let f = ConvexFunction::parse(function).map_err(|e| CliError::Usage(e.to_string()))?;
    let files = load_all(&common.inputs)?;
    let inst = match mode {
        Mode::Thm1 => {
            expect_inputs(&files, 2, "thm1")?;
            theorem1_unitaries(&files[0].to_hermitian(&tol)?, &files[1].to_isometry(&tol)?, &f, &tol)?
        }
        Mode::Contraction => {
            expect_inputs(&files, 2, "contraction")?;
            contraction_unitaries(&files[0].to_hermitian(&tol)?, &files[1].validate(&tol)?, &f, &tol)?
        }
        Mode::Column => {
            if files.is_empty() || files.len() % 2 != 0 {
                return Err(CliError::Usage("column needs alternating A₁ Z₁ A₂ Z₂ … inputs".into()));
            }
            let as_ = files.iter().step_by(2).map(|m| m.to_hermitian(&tol)).collect::<Result<Vec<_>, _>>()?;
            let zs = files.iter().skip(1).step_by(2).map(|m| m.validate(&tol)).collect::<Result<Vec<_>, _>>()?;
            column_unitaries(&as_, &IsometricColumn::new(zs, tol.unitary)?, &f, &tol)?
        }
        Mode::Midpoint => {
            expect_inputs(&files, 2, "midpoint")?;
            midpoint_unitaries(&files[0].to_hermitian(&tol)?, &files[1].to_hermitian(&tol)?, &f, &tol)?
        }
    };
    let out = CertificateFile::from_instance(&inst, &tol)?;
    emit(common.out.as_deref(), &serde_json::to_string_pretty(&out).expect("serializes"))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct VerifyOutput<'a> {
    passed: bool,
    checks: &'a [CheckReport],
}

pub fn cmd_verify(format: Format, common: &Common) -> CliResult<i32> {
    let tol = tolerances(&common.tol)?;
    let (x, y, pair) = match common.inputs.len() {
        1 => {
            let p = &common.inputs[0];
            let text = std::fs::read_to_string(p)
                .map_err(|source| IoError::Read { path: p.display().to_string(), source })?;
            let cert: CertificateFile = serde_json::from_str(&text)
                .map_err(|source| IoError::Parse { path: p.display().to_string(), source })?;
            let pair = UnitaryPair::new(cert.u.to_unitary(&tol)?, cert.v.to_unitary(&tol)?)?;
            (cert.x.to_hermitian(&tol)?, cert.y.to_hermitian(&tol)?, Some(pair))
        }
        2 | 4 => {
            let files = load_all(&common.inputs)?;
            let pair = if files.len() == 4 {
                Some(UnitaryPair::new(files[2].to_unitary(&tol)?, files[3].to_unitary(&tol)?)?)
            } else {
                None
            };
            (files[0].to_hermitian(&tol)?, files[1].to_hermitian(&tol)?, pair)
        }
        n => return Err(CliError::Usage(format!("verify takes 1, 2 or 4 inputs, got {n}"))),
    };

    let t = tol.order;
    let mut checks = Vec::new();
    if let Some(pair) = &pair {
        checks.push(certificate_check(&x, &y, pair, t)?);
    }
    checks.push(staircase_check(&x, &y, t)?);
    checks.push(fan_sums_check(&x, &y, t)?);
    checks.push(weyl_check(&x, &y, t)?);
    let passed = checks.iter().all(|c| c.passed);

    let text = match format {
        Format::Json => serde_json::to_string_pretty(&VerifyOutput { passed, checks: &checks }).expect("serializes"),
        Format::Csv => checks_csv(&checks),
    };
    emit(common.out.as_deref(), &text)?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// One row per check: `name,passed,worst_margin,location`.
pub fn checks_csv(checks: &[CheckReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "passed", "worst_margin", "location"]).expect("in-memory write");
    for c in checks {
        w.write_record([c.name.clone(), c.passed.to_string(), c.worst_margin.to_string(), c.location.clone()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_fuzz(spec: &RandomSpec, no_timing: bool, common: &Common) -> CliResult<i32> {
    let tol = tolerances(&common.tol)?;
    let report = run_campaign(spec, &tol, !no_timing)?;
    emit(common.out.as_deref(), &report.to_json())?;
    if spec.target.is_open() {
        eprintln!(
            "{}: {} trials, {} necessary-condition violations ({})",
            spec.target,
            report.trials_run,
            report.violations.len(),
            report.note.as_deref().unwrap_or("")
        );
        return Ok(EXIT_OK);
    }
    Ok(if report.status == "PASS" { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Construct { mode, function, common } => cmd_construct(*mode, function, common),
        Command::Verify { format, common } => cmd_verify(*format, common),
        Command::Fuzz { target, function, dim, sub, m, trials, seed, no_timing, common } => {
            let spec = RandomSpec {
                seed: *seed,
                dim: *dim,
                subspace_dim: *sub,
                m: *m,
                function: function.clone(),
                trials: *trials,
                target: *target,
            };
            cmd_fuzz(&spec, *no_timing, common)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
