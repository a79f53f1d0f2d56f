//! `rwde`: command-line checks for random walks in Dirichlet environments
//! and their hypergeometric integrals.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use input::CliError;

#[derive(Parser, Debug)]
#[command(name = "rwde", version, about = "Verify Dirichlet-environment and hypergeometric-integral identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the standing assumptions on a graph.
    Validate(Common),
    /// List spanning trees, cycles, paths and the hat graph.
    Enumerate(Common),
    /// Draw a Dirichlet environment and compare sample means with the exact ones.
    SampleEnv(Common),
    /// Compare C_α Î_T̂(λ) with the Dirichlet expectation for each directed tree.
    VerifyThm21(Common),
    /// Check the pairing identity and the cohomological relations.
    VerifyIdentities(Common),
    /// Check every commutation relation between the Ω matrices.
    CheckCommutation(Common),
    /// Check Ω ∧ Ω = 0 at random points.
    CheckFlatness(Common),
    /// Transport the integrals along a path in λ and compare with quadrature.
    Transport(TransportArgs),
    /// Compare Wilson's algorithm with the exact tree law.
    WilsonTest(Common),
    /// Compare the Laplace transform with the sum over directed trees.
    Laplace(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Graph file, or the name of a bundled graph.
    #[arg(long)]
    graph: String,
    /// Weight overrides `edge=value`.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<String>,
    /// Spectral parameter `edge=value`; omitted edges take the command default.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<String>,
    /// Edge ids of one spanning tree.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    tree: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    #[arg(long)]
    float: bool,
}

#[derive(Args, Debug, Clone)]
struct TransportArgs {
    #[command(flatten)]
    common: Common,
    /// Waypoint `edge=value,...` with complex values such as `1+0.5i`;
    /// omitted edges keep the previous waypoint's value.
    #[arg(long)]
    waypoint: Vec<String>,
    /// Work on the hat graph, with λ zero on the vertex edges.
    #[arg(long)]
    hat: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Enumerate(_) => "enumerate",
            Command::SampleEnv(_) => "sample-env",
            Command::VerifyThm21(_) => "verify-thm21",
            Command::VerifyIdentities(_) => "verify-identities",
            Command::CheckCommutation(_) => "check-commutation",
            Command::CheckFlatness(_) => "check-flatness",
            Command::Transport(_) => "transport",
            Command::WilsonTest(_) => "wilson-test",
            Command::Laplace(_) => "laplace",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Transport(t) => &t.common,
            Command::Validate(c)
            | Command::Enumerate(c)
            | Command::SampleEnv(c)
            | Command::VerifyThm21(c)
            | Command::VerifyIdentities(c)
            | Command::CheckCommutation(c)
            | Command::CheckFlatness(c)
            | Command::WilsonTest(c)
            | Command::Laplace(c) => c,
        }
    }
}

/// The outcome of one command: its inputs as resolved, its results and the
/// conjunction of its checks.
pub struct Outcome {
    pub inputs: Value,
    pub results: Value,
    pub pass: bool,
}

fn run(command: &Command) -> Result<Outcome, CliError> {
    let c = command.common();
    input::check_ranges(c.samples, c.tol)?;
    match command {
        Command::Validate(c) => commands::validate(c),
        Command::Enumerate(c) => commands::enumerate(c),
        Command::SampleEnv(c) => commands::sample_env(c),
        Command::VerifyThm21(c) => commands::verify_thm21(c),
        Command::VerifyIdentities(c) => commands::verify_identities(c),
        Command::CheckCommutation(c) => commands::check_commutation(c),
        Command::CheckFlatness(c) => commands::check_flatness(c),
        Command::Transport(t) => commands::transport(t),
        Command::WilsonTest(c) => commands::wilson_test(c),
        Command::Laplace(c) => commands::laplace(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.status);
        }
    };
    let report = json!({
        "command": cli.command.name(),
        "inputs": outcome.inputs,
        "results": outcome.results,
        "pass": outcome.pass,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &cli.command.common().out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else if matches!(cli.command, Command::Validate(_)) {
        ExitCode::from(3)
    } else {
        ExitCode::from(1)
    }
}
