//! Command-line front door. All input and output is JSON.
//!
//! Exit codes: `0` uniqueness certified (or command succeeded), `1`
//! inconclusive (or a suite failed), `2` resonance witnessed, `3` input error.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certifier::{
    certify_auto, check_classical_first, check_dolph, check_greedy, check_l1_global, check_l1_partition,
    check_linf_partition, check_nonlinear, infer_n, Certificate, NonlinearMode, Partition, Verdict,
};
use crate::constants::{beta1, beta_inf, lambda_n, mu_n};
use crate::constructions::{constant_resonant, l1_counterexample, minimizing_sequence, resonant_step};
use crate::ode::{neumann_residual, BoundaryKind};
use crate::oracle::{fd_spectrum, resonance_indicator};
use crate::potential::Potential;
use crate::suites::{run_suite, DEFAULT_SEED};
use crate::{json, Error, Result};

pub const EXIT_UNIQUE: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_RESONANT: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "neumann-cert", version, about = "Nonresonance certificates for u'' + a(x)u = 0 with Neumann conditions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Classical,
    Dolph,
    L1,
    LinfPartition,
    L1Partition,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Neumann,
    MixedNd,
    MixedDn,
}

impl From<BcArg> for BoundaryKind {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Neumann => BoundaryKind::NeumannNeumann,
            BcArg::MixedNd => BoundaryKind::MixedND,
            BcArg::MixedDn => BoundaryKind::MixedDN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionKind {
    Minimizing,
    ResonantStep,
    Constant,
    Counterexample,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify uniqueness of the trivial solution for a potential.
    Certify {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Comma-separated points or a path to a JSON array.
        #[arg(long)]
        partition: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        /// Lower bound α for the nonlinear problem; `--potential` is then β.
        #[arg(long)]
        alpha: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Finite-difference spectrum of −u'' − a u and the shooting residual.
    Spectrum {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long = "N", default_value_t = 2000)]
        grid: usize,
        #[arg(long, value_enum, default_value = "neumann")]
        bc: BcArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a resonant or counterexample potential with its solution.
    Construct {
        #[arg(value_enum)]
        kind: ConstructionKind,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        partition: Option<String>,
        /// Where to write the potential; the solution goes to `<output>.solution.json`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues and Lyapunov constants for given n and L.
    Constants {
        #[arg(long)]
        n: u32,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a verification suite: j, f, spectrum, partition, lemma22, thm32.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Output of a command: JSON text and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub json: String,
    pub code: i32,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_partition(spec: &str) -> Result<Partition> {
    let path = Path::new(spec);
    let points: Vec<f64> = if path.exists() {
        read_json(path)?
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("partition point {s:?}: {e}"))))
            .collect::<Result<_>>()?
    };
    Partition::from_points(points)
}

fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Argument(format!("--{name} is required here")))
}

fn certificate_code(c: &Certificate) -> i32 {
    match c.verdict {
        Verdict::UniqueTrivial => EXIT_UNIQUE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
        Verdict::ResonantWitness => EXIT_RESONANT,
    }
}

fn outcome<T: Serialize>(value: &T, code: i32) -> Outcome {
    Outcome {
        json: json::to_string_pretty(value),
        code,
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    eigenvalues: Vec<f64>,
    min_abs: f64,
    shooting_residual: Option<f64>,
}

#[derive(Serialize)]
struct ConstantsReport {
    n: u32,
    #[serde(rename = "L")]
    length: f64,
    lambda_n: f64,
    lambda_n1: f64,
    beta1: f64,
    beta_inf: f64,
    mu_n: f64,
}

#[allow(clippy::too_many_arguments)]
fn certify(
    potential: &Path,
    n: Option<u32>,
    method: MethodArg,
    partition: Option<&str>,
    eps: Option<f64>,
    alpha: Option<&Path>,
) -> Result<Certificate> {
    let a: Potential = read_json(potential)?;
    let part = partition.map(parse_partition).transpose()?;
    let n = match (n, &part) {
        (Some(n), Some(p)) if p.n() != n => {
            return Err(Error::Argument(format!("--n {n} disagrees with a partition for n = {}", p.n())));
        }
        (Some(n), _) => Some(n),
        (None, Some(p)) => Some(p.n()),
        (None, None) => None,
    };
    if let Some(alpha) = alpha {
        let alpha: Potential = read_json(alpha)?;
        let n = n.unwrap_or_else(|| infer_n(&alpha).max(1));
        let mode = match method {
            MethodArg::LinfPartition => NonlinearMode::LinfPartition(require(part, "partition")?),
            MethodArg::L1Partition => NonlinearMode::L1Partition(require(part, "partition")?),
            MethodArg::Greedy | MethodArg::Auto => {
                NonlinearMode::Greedy(eps.unwrap_or(1e-6 * n as f64 * std::f64::consts::PI / a.length()))
            }
            other => return Err(Error::Argument(format!("method {other:?} does not apply with --alpha"))),
        };
        return check_nonlinear(&alpha, &a, n, &mode);
    }
    let pick_n = || n.unwrap_or_else(|| infer_n(&a).max(1));
    match method {
        MethodArg::Auto => certify_auto(&a, n),
        MethodArg::Classical => Ok(check_classical_first(&a)),
        MethodArg::Dolph => check_dolph(&a, pick_n()),
        MethodArg::L1 => check_l1_global(&a, pick_n()),
        MethodArg::LinfPartition => check_linf_partition(&a, &require(part, "partition")?),
        MethodArg::L1Partition => check_l1_partition(&a, &require(part, "partition")?),
        MethodArg::Greedy => check_greedy(&a, pick_n(), eps),
    }
}

#[derive(Serialize)]
struct ConstructOutput<S: Serialize> {
    potential: Potential,
    solution: Option<S>,
}

fn construct(kind: ConstructionKind, n: Option<u32>, length: f64, eps: Option<f64>, q: Option<u32>, partition: Option<&str>) -> Result<(Potential, Option<crate::constructions::ClosedFormSolution>)> {
    Ok(match kind {
        ConstructionKind::Minimizing => {
            let (a, s) = minimizing_sequence(require(n, "n")?, length, require(eps, "eps")?)?;
            (a, Some(s))
        }
        ConstructionKind::ResonantStep => {
            let (a, s) = resonant_step(&parse_partition(require(partition, "partition")?)?)?;
            (a, Some(s))
        }
        ConstructionKind::Constant => {
            let (a, s) = constant_resonant(require(q.or(n), "q")?, length)?;
            (a, Some(s))
        }
        ConstructionKind::Counterexample => {
            let part = parse_partition(require(partition, "partition")?)?;
            (l1_counterexample(&part, eps.unwrap_or(1e-3))?, None)
        }
    })
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| Error::Parse(format!("stdout: {e}")))
        }
    }
}

/// Runs a parsed command. Output files are written here; the JSON is also returned.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    let (out, path) = match cmd {
        Command::Certify { potential, n, method, partition, eps, alpha, output } => {
            let cert = certify(potential, *n, *method, partition.as_deref(), *eps, alpha.as_deref())?;
            (outcome(&cert, certificate_code(&cert)), output)
        }
        Command::Spectrum { potential, grid, bc, output } => {
            let a: Potential = read_json(potential)?;
            let bc = BoundaryKind::from(*bc);
            let eigenvalues = fd_spectrum(&a, *grid, bc)?;
            let shooting_residual = match bc {
                BoundaryKind::NeumannNeumann => Some(neumann_residual(&a)?),
                _ => Some(crate::ode::disfocal_residual(&a, a.domain(), bc)?),
            };
            let report = SpectrumReport {
                min_abs: resonance_indicator(&eigenvalues),
                eigenvalues,
                shooting_residual,
            };
            (outcome(&report, 0), output)
        }
        Command::Construct { kind, n, length, eps, q, partition, output } => {
            let (potential, solution) = construct(*kind, *n, *length, *eps, *q, partition.as_deref())?;
            if let Some(p) = output {
                let sol_path = p.with_extension("solution.json");
                write_or_print(Some(p), &json::to_string_pretty(&potential))?;
                if let Some(s) = &solution {
                    write_or_print(Some(&sol_path), &json::to_string_pretty(s))?;
                }
                let out = outcome(&ConstructOutput { potential, solution }, 0);
                return Ok(out);
            }
            (outcome(&ConstructOutput { potential, solution }, 0), &None)
        }
        Command::Constants { n, length, output } => {
            if *n == 0 || !(length.is_finite() && *length > 0.0) {
                return Err(Error::Argument("need n ≥ 1 and L > 0".into()));
            }
            let report = ConstantsReport {
                n: *n,
                length: *length,
                lambda_n: lambda_n(*n, *length),
                lambda_n1: lambda_n(n + 1, *length),
                beta1: beta1(*n as f64, *length)?,
                beta_inf: beta_inf(*n, *length),
                mu_n: mu_n(*n, *length)?,
            };
            (outcome(&report, 0), output)
        }
        Command::Verify { suite, seed, output } => {
            let seed = match seed {
                Some(s) => *s,
                None => match std::env::var("NEUMANN_CERT_SEED") {
                    Ok(v) => v.parse().map_err(|e| Error::Parse(format!("NEUMANN_CERT_SEED: {e}")))?,
                    Err(_) => DEFAULT_SEED,
                },
            };
            let report = run_suite(suite, seed)?;
            let code = if report.passed { 0 } else { 1 };
            (outcome(&report, code), output)
        }
    };
    write_or_print(path.as_deref(), &out.json)?;
    Ok(out)
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
}

/// Parses `args`, runs the command and returns the exit code. Panics and
/// errors are reported on stderr and mapped to exit code 3.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match catch_unwind(AssertUnwindSafe(|| execute(&cli.command))) {
        Ok(Ok(out)) => out.code,
        Ok(Err(e)) => {
            eprintln!("{}", json::to_string(&ErrorReport { error: e.to_string() }));
            EXIT_INPUT
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            eprintln!("{}", json::to_string(&ErrorReport { error: format!("internal error: {msg}") }));
            EXIT_INPUT
        }
    }
}
