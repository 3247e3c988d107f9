//! `shockadj`: Burgers and Euler adjoint runs and the acceptance suite.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use config::{BurgersCase, MeshSource, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2: unreadable or invalid configuration, mesh or environment.
    Config(anyhow::Error),
    /// Exit 3: a solve did not converge or left the admissible states.
    Convergence(anyhow::Error),
    /// Exit 4: a verification check failed.
    Verification(String),
    /// Exit 1: anything else (I/O, ...).
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 2,
            Failure::Convergence(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    /// Classifies an error raised by a solver call.
    pub fn solve(e: shockadj_core::Error) -> Self {
        use shockadj_core::Error as E;
        match e {
            E::Convergence(_) | E::Domain(_) | E::Singular(_) | E::Cfl { .. } => Failure::Convergence(e.into()),
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e:#}"),
            Failure::Convergence(e) => write!(f, "convergence failure: {e:#}"),
            Failure::Verification(m) => write!(f, "verification failure: {m}"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "shockadj", version, about = "Discrete adjoints of shocked flows and their continuous-adjoint checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Configuration file (key = value with [sections]); defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "shockadj-out")]
    out: PathBuf,
    /// Validate the configuration (and mesh) and exit without solving.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Fault {
    /// Perturb the analytic flux Jacobian.
    CorruptJacobian,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// 1D Burgers forward/adjoint run with FD comparison.
    Burgers {
        #[command(flatten)]
        common: Common,
        /// Overrides burgers.case.
        #[arg(long, value_enum)]
        case: Option<BurgersCase>,
        /// Overrides burgers.t_final.
        #[arg(long = "T", value_name = "T")]
        t_final: Option<f64>,
        /// Overrides burgers.n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// 2D Euler forward solve, adjoint, boundary verification and outputs.
    Euler {
        #[command(flatten)]
        common: Common,
        /// Overrides mesh.source.
        #[arg(long, value_enum)]
        case: Option<MeshSource>,
        /// Compare the adjoint dJ/dρ∞ with finite differences.
        #[arg(long)]
        gradient_check: bool,
    },
    /// Run the acceptance matrix; exit 0 iff every selected criterion passes.
    VerifyAll {
        /// Restrict to a group ("burgers", "euler"), a number or a title substring.
        #[arg(long, value_name = "NAME")]
        filter: Option<String>,
        /// Also write the report and a manifest here.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// List the selected criteria without running them.
        #[arg(long)]
        dry_run: bool,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ADJ_EULER_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(Failure::Config(anyhow::anyhow!("ADJ_EULER_THREADS must be a positive integer, got '{v}'"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(anyhow::anyhow!("thread pool: {e}")))
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    RunConfig::load(common.config.as_deref()).map_err(Failure::Config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Burgers { common, case, t_final, n } => {
            let mut cfg = load(&common)?;
            if let Some(c) = case {
                cfg.burgers.case = c;
            }
            if t_final.is_some() {
                cfg.burgers.t_final = t_final;
            }
            if n.is_some() {
                cfg.burgers.n = n;
            }
            commands::burgers(&cfg, &common.out, common.dry_run)
        }
        Command::Euler { common, case, gradient_check } => {
            let mut cfg = load(&common)?;
            if let Some(c) = case {
                cfg.mesh.source = c;
            }
            cfg.gradient_check.enabled |= gradient_check;
            commands::euler(&cfg, &common.out, common.dry_run)
        }
        Command::VerifyAll { filter, out, dry_run, inject_fault } => {
            let faults = shockadj_core::acceptance::Faults { corrupt_jacobian: inject_fault == Some(Fault::CorruptJacobian) };
            commands::verify_all(filter.as_deref(), out.as_deref(), dry_run, faults)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("shockadj: {f}");
            ExitCode::from(f.code())
        }
    }
}
