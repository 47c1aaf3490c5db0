//! `stcvrp` command-line tool.
//!
//! Exit codes: 0 success (or a feasible schedule), 1 validation failure,
//! 2 usage error or invalid input, 3 I/O error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stcvrp::instances::Pattern;

#[derive(Parser)]
#[command(name = "stcvrp", version, about = "Vibroseis routing with slip-time separation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance named like G50_5k_150d.stcvrp
    Generate(GenerateArgs),
    /// Run the genetic search one or more times
    Solve(SolveArgs),
    /// Simulate a route set and print its schedule as JSON
    Evaluate(EvaluateArgs),
    /// Check a schedule against every constraint; exit 1 on violations
    Validate(ValidateArgs),
    /// Write the mixed-integer model in CPLEX LP format
    ExportMilp(ExportArgs),
    /// Exhaustively search every route set of a tiny instance
    BruteForce(BruteArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// grid, random or clustered
    #[arg(long)]
    pattern: Pattern,
    /// number of tasks (taken from the file when importing)
    #[arg(long)]
    n: Option<usize>,
    /// number of vehicles
    #[arg(long)]
    k: usize,
    /// separation cutoff distance, meters
    #[arg(long)]
    dmax: f64,
    /// grid jitter standard deviation, meters
    #[arg(long, default_value_t = 4.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// target average nearest-neighbor distance, meters
    #[arg(long, default_value_t = 40.0)]
    target: f64,
    /// output directory
    #[arg(long)]
    out: PathBuf,
    /// TSPLIB or Solomon coordinate file to convert instead of sampling
    #[arg(long)]
    import: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// seed of the first run; run r uses seed + r
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// independent runs, executed in parallel. The aggregate reports the
    /// sample standard deviation (n - 1 denominator).
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    crossover_rate: Option<f64>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    elite: Option<usize>,
    #[arg(long)]
    tournament: Option<usize>,
    #[arg(long)]
    stagnation: Option<usize>,
    #[arg(long)]
    max_generations: Option<usize>,
    /// probability of 2-opt versus reinsertion in a mutation
    #[arg(long)]
    mutation_mix: Option<f64>,
    /// directory for result JSON, convergence CSVs, best route set and manifest
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// route set as JSON, e.g. [[1,2],[3]]
    #[arg(long)]
    solution: PathBuf,
    /// write the schedule here (plus a manifest) instead of only printing it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    /// schedule JSON as printed by `evaluate`; simulated when omitted
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    /// big-M constant; defaults to the computed makespan upper bound
    #[arg(long)]
    bigm: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BruteArgs {
    #[arg(long)]
    instance: PathBuf,
    /// refuse instances with more route sets than this
    #[arg(long, default_value_t = 10_000_000)]
    limit: u128,
    /// write the optimum JSON here (plus a manifest)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Solve(a) => commands::solve(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Validate(a) => commands::validate(a),
        Command::ExportMilp(a) => commands::export_milp(a),
        Command::BruteForce(a) => commands::brute_force(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
