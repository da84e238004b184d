//! Command-line front end for `qcontrol`.
//!
//! Exit codes: 0 on success, 1 when the analysis ran but found no dark
//! state, 2 for input and validation errors, 3 for numerical failures.
//! Errors print one JSON line to stderr and leave output paths untouched.

#![forbid(unsafe_code)]

pub mod error;
pub mod output;
pub mod problem;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use qcontrol::channel::minimal_kraus;
use qcontrol::json::{self, ChannelJson, ReportJson};
use qcontrol::scenario::{run_demo, run_transfer, uniform_grid, uniform_h0_state, DonorAcceptorParams};
use qcontrol::state::PureState;
use qcontrol::{analyze, KrausKind, TolerancePolicy};
use serde::Serialize;

pub use error::{CliError, EXIT_INPUT, EXIT_NO_DARK_STATE, EXIT_NUMERICAL};
pub use problem::{load_problem, parse_problem, ChannelSource, ProblemFile};

/// Environment variable overriding the relative tolerance.
pub const TOL_ENV: &str = "QCONTROL_TOL";

#[derive(Debug, Parser)]
#[command(name = "qcontrol", version, about = "Dark-state analysis of open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a problem file and check every invariant.
    Validate { problem: PathBuf },
    /// Full feasibility report.
    Analyze {
        problem: PathBuf,
        #[command(flatten)]
        common: AnalysisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dark basis only; exits 1 if it is empty.
    DarkState {
        problem: PathBuf,
        #[command(flatten)]
        common: AnalysisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kraus operators of the problem's channel.
    ExtractKraus {
        problem: PathBuf,
        /// Reduce to the minimal (Choi rank) representation.
        #[arg(long)]
        minimal: bool,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subspace populations over time as CSV; needs a dilation.
    Simulate {
        problem: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        /// `dark`, `uniform`, or `file:<path>` holding `[[re, im], ...]`.
        #[arg(long)]
        initial: String,
        #[command(flatten)]
        common: AnalysisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Packaged demonstrations.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// Donor-acceptor transfer with the default parameters.
    DonorAcceptor {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct AnalysisArgs {
    /// Relative tolerance for rank decisions.
    #[arg(long)]
    tol: Option<f64>,
    /// Analyze with the minimal Kraus count (the default).
    #[arg(long, conflicts_with = "d_as_given")]
    use_minimal: bool,
    /// Analyze the representation as given.
    #[arg(long)]
    d_as_given: bool,
}

impl AnalysisArgs {
    fn use_minimal(&self, problem: &ProblemFile) -> bool {
        if self.d_as_given {
            false
        } else if self.use_minimal {
            true
        } else {
            problem.use_minimal.unwrap_or(true)
        }
    }
}

/// Relative tolerance from `--tol`, else `QCONTROL_TOL`, else `base`.
fn resolve_tolerance(base: TolerancePolicy, flag: Option<f64>) -> Result<TolerancePolicy, CliError> {
    let eps = match (flag, std::env::var_os(TOL_ENV)) {
        (Some(eps), _) => eps,
        (None, Some(raw)) => {
            let text = raw.to_string_lossy();
            text.trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("{TOL_ENV}={text} is not a number")))?
        }
        (None, None) => return Ok(base),
    };
    base.with_relative_eps(eps).map_err(invalid)
}

fn numerical(e: qcontrol::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn invalid(e: qcontrol::Error) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Serialize)]
struct ValidateSummary {
    valid: bool,
    source: &'static str,
    m0: usize,
    m1: usize,
    m2: usize,
    dim: usize,
    d: usize,
    kind: &'static str,
}

#[derive(Serialize)]
struct DarkStateOutput {
    m0: usize,
    d_minimal: usize,
    nullity: usize,
    dark_states: Vec<Vec<json::ComplexPair>>,
    verification: Vec<qcontrol::control::DarkStateResidual>,
}

#[derive(Serialize)]
struct SeriesInfo {
    initial: &'static str,
    t_max: f64,
    steps: usize,
    rows: usize,
}

#[derive(Serialize)]
struct DemoReport {
    params: DonorAcceptorParams,
    analysis: ReportJson,
    comparison: qcontrol::scenario::Comparison,
    series: SeriesInfo,
}

fn cmd_validate(path: &Path) -> Result<i32, CliError> {
    let problem = load_problem(path)?;
    let channel = problem.channel()?;
    let summary = ValidateSummary {
        valid: true,
        source: match problem.source {
            ChannelSource::Kraus(_) => "channel",
            ChannelSource::Dilation(_) => "dilation",
        },
        m0: problem.partition.m0(),
        m1: problem.partition.m1(),
        m2: problem.partition.m2(),
        dim: channel.dim(),
        d: channel.d(),
        kind: match channel.kind() {
            KrausKind::TracePreserving => "trace_preserving",
            KrausKind::TraceNonIncreasing => "trace_non_increasing",
            KrausKind::Invalid => "invalid",
        },
    };
    output::emit(None, &json::to_json_string(&summary))?;
    Ok(0)
}

fn run_analysis(
    path: &Path,
    common: &AnalysisArgs,
) -> Result<qcontrol::FeasibilityReport, CliError> {
    let problem = load_problem(path)?;
    let tol = resolve_tolerance(problem.tolerance, common.tol)?;
    let channel = problem.channel()?;
    analyze(&channel, &problem.partition, &tol, common.use_minimal(&problem)).map_err(numerical)
}

fn dark_exit(found: bool) -> i32 {
    if found {
        0
    } else {
        EXIT_NO_DARK_STATE
    }
}

fn cmd_analyze(path: &Path, common: &AnalysisArgs, out: Option<&Path>) -> Result<i32, CliError> {
    let report = run_analysis(path, common)?;
    output::emit(out, &json::to_json_string(&ReportJson::from(&report)))?;
    Ok(dark_exit(report.has_dark_state()))
}

fn cmd_dark_state(path: &Path, common: &AnalysisArgs, out: Option<&Path>) -> Result<i32, CliError> {
    let report = run_analysis(path, common)?;
    let body = DarkStateOutput {
        m0: report.m0,
        d_minimal: report.d_minimal,
        nullity: report.nullity,
        dark_states: report.dark_basis.iter().map(|v| json::vector_to_json(v)).collect(),
        verification: report.verification.clone(),
    };
    output::emit(out, &json::to_json_string(&body))?;
    Ok(dark_exit(report.has_dark_state()))
}

fn cmd_extract_kraus(
    path: &Path,
    minimal: bool,
    tol_flag: Option<f64>,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let problem = load_problem(path)?;
    let tol = resolve_tolerance(problem.tolerance, tol_flag)?;
    let mut channel = problem.channel()?;
    if minimal {
        channel = minimal_kraus(&channel, &tol).map_err(numerical)?;
    }
    output::emit(out, &json::to_json_string(&ChannelJson::from_channel(&channel)))?;
    Ok(0)
}

/// Reads an initial `H0` state from a JSON array of `[re, im]` pairs.
fn read_initial_state(path: &Path, m0: usize) -> Result<Vec<Complex64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let pairs: Vec<json::ComplexPair> =
        serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))?;
    if pairs.len() != m0 {
        return Err(CliError::Validation(format!(
            "initial state has {} amplitudes, expected M0 = {m0}",
            pairs.len()
        )));
    }
    let amplitudes = json::vector_from_json(&pairs);
    PureState::new(amplitudes.clone()).map_err(invalid)?;
    Ok(amplitudes)
}

fn cmd_simulate(
    path: &Path,
    t_max: f64,
    steps: usize,
    initial: &str,
    common: &AnalysisArgs,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let problem = load_problem(path)?;
    let Some(model) = problem.dilation() else {
        return Err(CliError::Validation(
            "simulate needs a `dilation` source to evolve in time".into(),
        ));
    };
    let grid = uniform_grid(t_max, steps).map_err(invalid)?;
    let p = &problem.partition;
    let psi0 = match initial {
        "uniform" => uniform_h0_state(p.m0()),
        "dark" => {
            let tol = resolve_tolerance(problem.tolerance, common.tol)?;
            let channel = problem.channel()?;
            let report =
                analyze(&channel, p, &tol, common.use_minimal(&problem)).map_err(numerical)?;
            match report.dark_basis.into_iter().next() {
                Some(v) => v,
                None => {
                    eprintln!(
                        "{}",
                        serde_json::json!({
                            "error": "NoDarkState",
                            "message": "no dark state exists at this tolerance"
                        })
                    );
                    return Ok(EXIT_NO_DARK_STATE);
                }
            }
        }
        other => match other.strip_prefix("file:") {
            Some(file) => read_initial_state(Path::new(file), p.m0())?,
            None => {
                return Err(CliError::Usage(format!(
                    "--initial must be dark, uniform or file:<path>, got `{other}`"
                )))
            }
        },
    };
    let series = run_transfer(model, p, &psi0, &grid).map_err(numerical)?;
    output::emit(out, &series.to_csv())?;
    Ok(0)
}

fn cmd_demo_donor_acceptor(seed: Option<u64>, out_dir: &Path) -> Result<i32, CliError> {
    let mut params = DonorAcceptorParams::default();
    if let Some(s) = seed {
        params.seed = s;
    }
    let tol = resolve_tolerance(TolerancePolicy::default(), None)?;
    let outcome = run_demo(&params, &tol).map_err(numerical)?;
    let report = DemoReport {
        params: outcome.params.clone(),
        analysis: ReportJson::from(&outcome.report),
        comparison: outcome.comparison,
        series: SeriesInfo {
            initial: "dark",
            t_max: outcome.t_max,
            steps: outcome.steps,
            rows: outcome.series.len(),
        },
    };
    let report_text = json::to_json_string(&report);
    let csv = outcome.series.to_csv();
    if !out_dir.is_dir() {
        return Err(CliError::Io(format!("{}: not a directory", out_dir.display())));
    }
    output::write_atomic(&out_dir.join("report.json"), &report_text)?;
    output::write_atomic(&out_dir.join("series.csv"), &csv)?;
    let summary = serde_json::json!({
        "dark_found": outcome.comparison.dark_found,
        "dark_pop2": outcome.comparison.dark_pop2,
        "uniform_pop2": outcome.comparison.uniform_pop2,
        "suppression_ratio": outcome.comparison.suppression_ratio,
    });
    output::emit(None, &format!("{summary}\n"))?;
    Ok(dark_exit(outcome.comparison.dark_found))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { problem } => cmd_validate(&problem),
        Command::Analyze { problem, common, out } => cmd_analyze(&problem, &common, out.as_deref()),
        Command::DarkState { problem, common, out } => {
            cmd_dark_state(&problem, &common, out.as_deref())
        }
        Command::ExtractKraus { problem, minimal, tol, out } => {
            cmd_extract_kraus(&problem, minimal, tol, out.as_deref())
        }
        Command::Simulate { problem, t_max, steps, initial, common, out } => {
            cmd_simulate(&problem, t_max, steps, &initial, &common, out.as_deref())
        }
        Command::Demo(Demo::DonorAcceptor { seed, out_dir }) => {
            cmd_demo_donor_acceptor(seed, &out_dir)
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.diagnostic());
            return err.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}
