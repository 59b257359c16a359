//! Command-line front end for Pareto-improvement-driven opinion dynamics.
//!
//! Every subcommand prints one JSON verdict `{command, status, payload}` to
//! stdout. Node ids are 1-based everywhere on the command line and in JSON
//! and CSV output; edge-list files use 0-based ids.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "pid-opinion", version, about = "Simulate and analyze Pareto-improvement-driven opinion dynamics")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random or regular influence network as an edge-list file
    Generate(GenerateArgs),
    /// Report strictly cohesive structure, consensus condition and seed sets
    Analyze(AnalyzeArgs),
    /// Run the stochastic dynamics until equilibrium
    Simulate(SimulateArgs),
    /// Build an explicit legal update sequence
    Construct(ConstructArgs),
    /// Run a seeded Monte Carlo sweep from a JSON config
    Sweep(SweepArgs),
    /// Check whether seeding nodes at the truth forces truth consensus
    VerifySeeds(VerifySeedsArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(subcommand)]
    family: GenerateFamily,
}

#[derive(Subcommand, Debug)]
enum GenerateFamily {
    /// Grid with von Neumann neighbours, equal out-weights
    Lattice {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Erdős–Rényi digraph; isolated nodes listen to themselves
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Watts–Strogatz small world
    Ws {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        out: GenerateOut,
    },
}

#[derive(Args, Debug)]
struct GenerateOut {
    /// Output edge-list path [default: <family>.edges]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Edge-list file
    #[arg(long)]
    net: PathBuf,
    /// Largest n handled by exact enumeration (at most 63)
    #[arg(long, default_value_t = pid_core::cohesion::DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    /// Maximum number of minimum seed sets listed
    #[arg(long, default_value_t = pid_core::cohesion::DEFAULT_WITNESS_CAP)]
    witness_cap: usize,
    /// Random restarts for the inexact fallback above the node budget
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct DomainArgs {
    /// Lowest opinion
    #[arg(long, allow_hyphen_values = true)]
    lo: i64,
    /// Highest opinion
    #[arg(long, allow_hyphen_values = true)]
    hi: i64,
    /// The truth
    #[arg(long, allow_hyphen_values = true)]
    theta: i64,
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// Initial opinions, comma separated, in node order
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x0_file")]
    x0: Option<String>,
    /// File of comma- or whitespace-separated initial opinions
    #[arg(long)]
    x0_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    net: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
    /// Initial state; uniformly random over the domain when omitted
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    /// Equilibrium test period [default: n]
    #[arg(long)]
    check_every: Option<u64>,
    #[arg(long, value_enum, default_value_t = ChoiceArg::Uniform)]
    choice: ChoiceArg,
    /// Write every activation as CSV `t,node,new_opinion`
    #[arg(long)]
    events: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ChoiceArg {
    Uniform,
    UniformExcludingCurrent,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Equilibrium,
    Decross,
    Compress,
    FalseOutcome,
    TruthConsensus,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    net: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
    #[command(flatten)]
    state: StateArgs,
    /// Input sequence CSV `step,node,new_opinion` for decross/compress;
    /// when omitted, a short truth-consensus sequence is searched for
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Search depth used when no input sequence is given
    #[arg(long, default_value_t = 12)]
    search_depth: usize,
    /// Write the resulting sequence as CSV `step,node,new_opinion`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Summary CSV `param,metric,mean,ci_lo,ci_hi,n_reps,n_nonconverged`
    #[arg(long)]
    out: PathBuf,
    /// Also write one CSV row per replicate
    #[arg(long)]
    raw: Option<PathBuf>,
    /// Worker threads; results do not depend on this
    #[arg(long, env = "PID_OPINION_JOBS")]
    jobs: Option<usize>,
    /// Full-size protocol: 1000 replicates on the grid 0.01..1 (slow)
    #[arg(long)]
    full_scale: bool,
}

#[derive(Args, Debug)]
struct VerifySeedsArgs {
    #[arg(long)]
    net: PathBuf,
    /// Seed nodes, comma separated, 1-based
    #[arg(long)]
    seeds: String,
    #[arg(long, default_value_t = pid_core::cohesion::DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    #[arg(long, default_value_t = 8)]
    witness_cap: usize,
}

/// Failure classes, mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<pid_core::Error> for CliError {
    fn from(e: pid_core::Error) -> Self {
        match e {
            pid_core::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Verdict<'a> {
    command: &'a str,
    status: &'a str,
    payload: Value,
}

fn emit(command: &str, status: &str, payload: Value) {
    let v = Verdict { command, status, payload };
    println!("{}", serde_json::to_string_pretty(&v).expect("verdict serializes"));
}

fn fail(command: &str, err: CliError) -> ExitCode {
    let (kind, message, code) = match err {
        CliError::Usage(m) => ("usage", m, 2),
        CliError::Runtime(m) => ("runtime", m, 1),
    };
    eprintln!("error: {message}");
    emit(command, "error", serde_json::json!({ "kind": kind, "message": message }));
    ExitCode::from(code)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Generate(_) => "generate",
        Command::Analyze(_) => "analyze",
        Command::Simulate(_) => "simulate",
        Command::Construct(_) => "construct",
        Command::Sweep(_) => "sweep",
        Command::VerifySeeds(_) => "verify-seeds",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let attempted = std::env::args().nth(1).unwrap_or_default();
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            let msg = first.strip_prefix("error: ").unwrap_or(first).to_string();
            emit(&attempted, "error", serde_json::json!({ "kind": "usage", "message": msg }));
            return ExitCode::from(2);
        }
    };
    let name = command_name(&cli.command);
    std::panic::set_hook(Box::new(|_| {}));
    let result = std::panic::catch_unwind(|| commands::run(cli.command));
    match result {
        Ok(Ok(payload)) => {
            emit(name, "ok", payload);
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => fail(name, e),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown".into());
            fail(name, CliError::runtime(format!("internal error: {msg}")))
        }
    }
}
