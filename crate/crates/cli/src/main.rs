use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use powerval::report::{Format, Report};
use powerval::valuation::Flavor;

mod commands;

/// Exact computations with valuations on finite posets.
#[derive(Parser, Debug)]
#[command(name = "powerval", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output style.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Largest poset accepted from input or generated by suites.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..=20))]
    max_size: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Opens, sobriety and finitary bases of a poset.
    Order(Input),
    /// Compare the first two valuations of a document.
    Leq(Input),
    /// Choquet integrals of every step function against every valuation and capacity.
    Choquet(Input),
    /// Split the first capacity below the first valuation.
    Decompose(Input),
    /// Build and check the finitary compact sandwich around a valuation.
    Witness(WitnessArgs),
    /// Find δ_n in a basic weak neighbourhood of δ_∞ on α(ℕ).
    Counterexample(CounterexampleArgs),
    /// Solve a zero-sum matrix game by both linear programs.
    Game(Input),
    /// Run every seeded property suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct Input {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    input: PathBuf,
    /// Denominator of the grid of test valuations.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    grid: u64,
    /// Overrides the flavor given on the `val` line.
    #[arg(long, value_parser = parse_flavor)]
    flavor: Option<Flavor>,
}

#[derive(Args, Debug)]
struct CounterexampleArgs {
    /// Alternating `E={..}` and `r=q` tokens.
    #[arg(required = true, allow_hyphen_values = true)]
    conjuncts: Vec<String>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    grid: u64,
    /// Instances per sandwich flavor.
    #[arg(long, default_value_t = 100)]
    sandwich_cases: usize,
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format `{s}`, expected text or json-lines"))
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    Flavor::parse(s).ok_or_else(|| format!("unknown flavor `{s}`, expected plain, sub or prob"))
}

/// Why a command stopped.
pub enum Failure {
    /// Bad input; exit status 2.
    Usage(String),
}

/// A finished command: its report and whether every check held.
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let max_size = cli.common.max_size as usize;
    let result = match &cli.command {
        Command::Order(a) => commands::order(&a.input, max_size),
        Command::Leq(a) => commands::leq(&a.input, max_size),
        Command::Choquet(a) => commands::choquet(&a.input, max_size),
        Command::Decompose(a) => commands::decompose(&a.input, max_size),
        Command::Witness(a) => commands::witness(&a.input, max_size, a.grid, a.flavor),
        Command::Counterexample(a) => commands::counterexample(&a.conjuncts),
        Command::Game(a) => commands::game(&a.input),
        Command::Selftest(a) => commands::selftest(a.seed, max_size, a.grid, a.sandwich_cases),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report.render(cli.common.format));
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
