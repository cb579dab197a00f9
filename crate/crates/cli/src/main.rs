use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CmdError, Outcome};

/// Exit status of a run that completed with a positive or neutral verdict.
const EXIT_OK: u8 = 0;
/// A verdict came out negative: falsified, violated, not found.
const EXIT_NEGATIVE: u8 = 2;
/// Bad arguments, unreadable or invalid spec, unmet preconditions.
const EXIT_INPUT: u8 = 3;

const THREADS_VAR: &str = "COCYCLE_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "cocycle-lab", version, about = "Analyses of SL(2,R) cocycles over subshifts of finite type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a spec and report fiber bunching and the Hölder estimate.
    Check(CheckArgs),
    /// Periodic-orbit exponents up to a period, or sampled exponents.
    Lyapunov(LyapunovArgs),
    /// Try to certify uniform hyperbolicity with cones, and to falsify it.
    Certify(CertifyArgs),
    /// Close a slow orbit segment into a periodic orbit with small exponent.
    Transfer(TransferArgs),
    /// Run the checks of the built-in non-uniformly hyperbolic example.
    Counterexample(CounterexampleArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    spec: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["max_period", "sample"]))]
pub struct LyapunovArgs {
    spec: PathBuf,
    /// Exact exponents of every periodic orbit up to this period.
    #[arg(long)]
    max_period: Option<usize>,
    /// Gap threshold checked against every periodic exponent.
    #[arg(long, requires = "max_period")]
    tau: Option<f64>,
    /// Largest number of orbits enumerated.
    #[arg(long, default_value_t = cocycle_core::symbolic::DEFAULT_ORBIT_CAP)]
    cap: usize,
    /// Per-orbit table with columns period, word, lambda_plus.
    #[arg(long, requires = "max_period")]
    csv: Option<PathBuf>,
    /// Sampled exponent over this many steps per trial.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 16, requires = "sample")]
    trials: usize,
    #[arg(long, default_value_t = 0, requires = "sample")]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    spec: PathBuf,
    /// Probe rates; a point with |A^n(x)| <= e^(tau n)/2 falsifies.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.3])]
    probe_tau: Vec<f64>,
    /// Longest product examined by the probe.
    #[arg(long, default_value_t = 60)]
    probe_horizon: usize,
    /// Periodic points up to this period seed the probe.
    #[arg(long, default_value_t = 8)]
    probe_period: usize,
    #[arg(long, default_value_t = 200)]
    refine_steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    margin: f64,
    #[arg(long, default_value_t = 12)]
    max_word_len: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
pub struct TransferArgs {
    spec: PathBuf,
    /// Length of the slow orbit segment.
    #[arg(long)]
    n0: usize,
    /// Required slowness: log|A^n0(x)| <= eps n0.
    #[arg(long)]
    eps: f64,
    /// Periodic points up to this period form the search set.
    #[arg(long, default_value_t = 8)]
    search_period: usize,
    /// Tolerance on holonomy truncation.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verify {
    All,
    NotUh,
    Cones,
    Exponents,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum, default_value_t = Verify::All)]
    verify: Verify,
    /// Cutoff override; smaller than the determined value is rejected.
    #[arg(long)]
    k0: Option<u64>,
    /// Excursions T^{-n} q are checked for n up to this.
    #[arg(long, default_value_t = 25)]
    n_max: i64,
    #[arg(long, default_value_t = 14)]
    max_period: usize,
    /// Sampled points for the cone and orbit-tracking checks.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

fn configure_threads() -> Result<(), CmdError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CmdError::Input(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CmdError::Input(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Outcome, CmdError> {
    configure_threads()?;
    let start = Instant::now();
    let (out, mut outcome) = match &cli.command {
        Command::Check(a) => (&a.out, commands::check(a)?),
        Command::Lyapunov(a) => (&a.out, commands::lyapunov(a)?),
        Command::Certify(a) => (&a.out, commands::certify(a)?),
        Command::Transfer(a) => (&a.out, commands::transfer(a)?),
        Command::Counterexample(a) => (&a.out, commands::counterexample(a)?),
    };
    outcome.report.wall_time_seconds = start.elapsed().as_secs_f64();
    let json = outcome.report.to_json();
    match &out.output {
        Some(path) => std::fs::write(path, json)
            .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(o) if o.negative => ExitCode::from(EXIT_NEGATIVE),
        Ok(_) => ExitCode::from(EXIT_OK),
        Err(CmdError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
