mod commands;
mod output;
mod selftest;
mod svg;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::OutputArgs;

/// Exit codes.
const USAGE: u8 = 1;
const FAILURE: u8 = 2;
const SELFTEST_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "wincuckoo", version, about = "Load thresholds and experiments for cuckoo hashing with windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the load threshold for one (k, ℓ).
    Threshold(ThresholdArgs),
    /// Compute thresholds for a grid of (k, ℓ).
    Table(TableArgs),
    /// Grow random instances until they break and report the failure curve.
    Simulate(SimulateArgs),
    /// Fill an LSA table and report mean touches per batch.
    LsaBench(LsaBenchArgs),
    /// Run the cross-checking oracle suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    ell: u32,
    /// Requested accuracy of γ.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value_t = 7)]
    k_max: u32,
    #[arg(long, default_value_t = 4)]
    ell_max: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value = "windows", value_parser = ["windows", "blocks", "plain"])]
    scheme: String,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    ell: u32,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct LsaBenchArgs {
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    ell: u32,
    /// Load to fill up to.
    #[arg(long, default_value_t = 0.9)]
    load: f64,
    /// Insertions per reported point.
    #[arg(long, default_value_t = wincuckoo::lsa::DEFAULT_BATCH)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deliberately break a component to check that the suites notice.
    #[arg(long, hide = true, value_parser = ["capacity"])]
    inject_fault: Option<String>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: USAGE, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Failure { code: FAILURE, message: message.into() }
    }

    pub fn selftest(message: impl Into<String>) -> Self {
        Failure { code: SELFTEST_FAILED, message: message.into() }
    }
}

impl From<wincuckoo::Error> for Failure {
    fn from(e: wincuckoo::Error) -> Self {
        match e {
            wincuckoo::Error::InvalidParams(_) => Failure::usage(e.to_string()),
            other => Failure::runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(format!("i/o error: {e}"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Threshold(a) => commands::threshold(a.k, a.ell, a.tol, &a.output),
        Command::Table(a) => commands::table(a.k_max, a.ell_max, a.tol, &a.output),
        Command::Simulate(a) => commands::simulate(&a.scheme, a.n, a.k, a.ell, a.trials, a.seed, &a.output),
        Command::LsaBench(a) => commands::lsa_bench(a.n, a.k, a.ell, a.load, a.batch, a.seed, &a.output),
        Command::Selftest(a) => selftest::run(a.seed, a.inject_fault.is_some()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use output::Format;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn formats_parse() {
        let cli = Cli::try_parse_from(["wincuckoo", "lsa-bench", "--format", "svg", "--load", "0.5"]).unwrap();
        match cli.command {
            Command::LsaBench(a) => {
                assert_eq!(a.output.format, Format::Svg);
                assert_eq!(a.load, 0.5);
            }
            other => panic!("parsed {other:?}"),
        }
        assert!(Cli::try_parse_from(["wincuckoo", "simulate", "--scheme", "hexagons"]).is_err());
    }
}
