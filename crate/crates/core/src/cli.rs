//! `qdt-entangle` command line: `measure`, `verify` and `maximal`.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 numeric failure or a
//! suspicious verification, 3 semantic validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::QdtError;
use crate::file::{parse_prospect_file, FileError, ParsedProspect};
use crate::measure::{entanglement_production_with, maximal_entanglement, EntanglementReport, LogBase, Method};
use crate::oracle::{compare_methods_with_base, DiscrepancyReport, OracleOptions};
use crate::state::{strategic_normalization_check, NormalizationCheck};
use crate::subnorm::OptimizerOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qdt-entangle", version, about = "Entanglement production of prospect operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Formula,
    Variational,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Formula => Method::Formula,
            MethodArg::Variational => Method::Variational,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct OptimizerArgs {
    /// Number of optimizer restarts.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Sweeps per restart.
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    /// Relative objective change that ends a restart.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OptimizerArgs {
    fn options(&self) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            tolerance: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the entanglement production of a prospect file.
    Measure {
        #[arg(short, long)]
        input: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        log_base: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Cross-check closed form, optimizer and sampling oracle.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        log_base: f64,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        refine_top: usize,
        #[arg(long, default_value_t = 200)]
        refine_steps: usize,
    },
    /// Print (N−1)·log M, the largest entanglement production of N actions with M modes.
    Maximal {
        #[arg(short = 'N', long = "actions")]
        actions: usize,
        #[arg(short = 'M', long = "modes")]
        modes: usize,
        #[arg(long, default_value_t = 2.0)]
        log_base: f64,
    },
}

#[derive(Debug, Serialize)]
struct MeasureOptions {
    log_base: f64,
    method: Method,
    restarts: usize,
    max_iterations: usize,
    tolerance: f64,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct LatticeSummary {
    prospects: usize,
    relations: usize,
    valid: bool,
}

#[derive(Debug, Serialize)]
struct MeasureDocument<'a> {
    command: &'static str,
    input: String,
    prospect_id: &'a str,
    options: MeasureOptions,
    report: EntanglementReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategic_check: Option<StrategicSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<LatticeSummary>,
}

#[derive(Debug, Serialize)]
struct StrategicSummary {
    /// ⟨s|P̂|s⟩ for the file's prospect operator.
    sum: f64,
    pass: bool,
}

impl From<NormalizationCheck> for StrategicSummary {
    fn from(c: NormalizationCheck) -> Self {
        Self { sum: c.sum, pass: c.pass }
    }
}

#[derive(Debug, Serialize)]
struct VerifyOptions {
    log_base: f64,
    restarts: usize,
    max_iterations: usize,
    tolerance: f64,
    seed: u64,
    samples: usize,
    refine_top: usize,
    refine_steps: usize,
}

#[derive(Debug, Serialize)]
struct VerifyDocument<'a> {
    command: &'static str,
    input: String,
    prospect_id: &'a str,
    options: VerifyOptions,
    comparison: DiscrepancyReport,
    suspicious: bool,
}

/// Failure of one command, already mapped to its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::new(e.exit_code(), e.to_string())
    }
}

impl From<QdtError> for CliError {
    fn from(e: QdtError) -> Self {
        let code = match e {
            QdtError::NumericFailure { .. } | QdtError::Capacity(_) => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        };
        CliError::new(code, e.to_string())
    }
}

fn read_input(path: &Path) -> Result<ParsedProspect, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_prospect_file(&bytes)?)
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// or to stdout.
fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::new(EXIT_PARSE, format!("cannot write report: {e}")))
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let write = || -> std::io::Result<()> {
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                tmp.write_all(text.as_bytes())?;
                tmp.as_file().sync_all()?;
                tmp.persist(path).map_err(|e| e.error)?;
                Ok(())
            };
            write().map_err(|e| CliError::new(EXIT_PARSE, format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report is serializable");
    s.push('\n');
    s
}

fn log_base(v: f64) -> Result<LogBase, CliError> {
    Ok(LogBase::new(v)?)
}

pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Measure {
            input,
            output,
            log_base: base,
            method,
            optimizer,
        } => {
            let base = log_base(base)?;
            let opts = optimizer.options();
            opts.validate()?;
            let parsed = read_input(&input)?;
            let method: Method = method.into();
            let report = entanglement_production_with(&parsed.state, base, &opts, method)?;
            let strategic_check = match &parsed.strategic {
                Some(s) => Some(strategic_normalization_check(&[parsed.state.operator()], s, 1e-9)?.into()),
                None => None,
            };
            let doc = MeasureDocument {
                command: "measure",
                input: input.display().to_string(),
                prospect_id: &parsed.state.prospect_id,
                options: MeasureOptions {
                    log_base: base.value(),
                    method,
                    restarts: opts.restarts,
                    max_iterations: opts.max_iterations,
                    tolerance: opts.tolerance,
                    seed: opts.seed,
                },
                report,
                strategic_check,
                lattice: parsed.lattice.as_ref().map(|l| LatticeSummary {
                    prospects: l.prospect_ids.len(),
                    relations: l.relations.len(),
                    valid: true,
                }),
            };
            emit(output.as_deref(), &to_json(&doc))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            input,
            output,
            log_base: base,
            optimizer,
            samples,
            refine_top,
            refine_steps,
        } => {
            let base = log_base(base)?;
            let opts = optimizer.options();
            opts.validate()?;
            let oopts = OracleOptions {
                samples,
                refine_top,
                refine_steps,
                seed: opts.seed,
            };
            oopts.validate()?;
            let parsed = read_input(&input)?;
            let comparison = compare_methods_with_base(&parsed.state, base, &opts, &oopts)?;
            let suspicious = comparison.is_suspicious();
            let doc = VerifyDocument {
                command: "verify",
                input: input.display().to_string(),
                prospect_id: &parsed.state.prospect_id,
                options: VerifyOptions {
                    log_base: base.value(),
                    restarts: opts.restarts,
                    max_iterations: opts.max_iterations,
                    tolerance: opts.tolerance,
                    seed: opts.seed,
                    samples,
                    refine_top,
                    refine_steps,
                },
                comparison,
                suspicious,
            };
            emit(output.as_deref(), &to_json(&doc))?;
            Ok(if suspicious { EXIT_NUMERIC } else { EXIT_OK })
        }
        Command::Maximal {
            actions,
            modes,
            log_base: base,
        } => {
            let value = maximal_entanglement(actions, modes, log_base(base)?)?;
            let mut text = serde_json::to_string(&value).expect("finite");
            text.push('\n');
            emit(None, &text)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// reporting errors on stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
