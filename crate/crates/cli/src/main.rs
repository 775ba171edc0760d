//! `qsep`: bounds, constructions, oracle certification and Monte Carlo runs
//! for separating, discriminating and cloning two pure states.
//!
//! Exit status: 0 on success, 2 on flag or domain errors, 3 when a contract
//! check fails.

mod commands;
mod error;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;
use crate::error::CliError;
use crate::output::{write_envelope, write_table, Format};

#[derive(Debug, Parser)]
#[command(
    name = "qsep",
    version,
    about = "Optimal state separation, discrimination and cloning"
)]
struct Cli {
    /// Output format on standard output.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form bounds for one overlap.
    Bounds(BoundsArgs),
    /// Build the optimal separating operation and check its structure.
    Verify(PairArgs),
    /// Monte Carlo run of a pipeline.
    Simulate(SimulateArgs),
    /// Brute-force maximization over the feasibility region.
    Oracle(OracleArgs),
    /// Tabulate bounds over a grid.
    Scan(ScanArgs),
}

/// Accepts plain decimal notation only, such as `0.25` or `-1`.
fn decimal(s: &str) -> Result<f64, String> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int.len() + frac.len() == 0 || !digits(int) || !digits(frac) {
        return Err(format!("'{s}' is not a plain decimal number"));
    }
    s.parse().map_err(|e| format!("'{s}': {e}"))
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Overlap magnitude |alpha| of the initial pair.
    #[arg(long, value_parser = decimal)]
    alpha: f64,
    /// Target overlap magnitude |beta|.
    #[arg(long, value_parser = decimal)]
    beta: Option<f64>,
    /// Copies held, for the M -> N cloning bound.
    #[arg(long, requires = "n")]
    m: Option<usize>,
    /// Copies produced.
    #[arg(long, requires = "m")]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long, value_parser = decimal)]
    alpha: f64,
    #[arg(long, value_parser = decimal)]
    beta: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SamplingArg {
    ClosedForm,
    StateVector,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// separation, discrimination or cloning.
    #[arg(long)]
    pipeline: String,
    #[arg(long, value_parser = decimal)]
    alpha: f64,
    #[arg(long, value_parser = decimal)]
    beta: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "closed-form")]
    sampling: SamplingArg,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, value_parser = decimal)]
    alpha: f64,
    #[arg(long, value_parser = decimal)]
    beta: f64,
    /// Points per probability axis.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = 3)]
    refine: usize,
    /// Points on the phase circle.
    #[arg(long, default_value_t = 64)]
    phases: usize,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Single alpha instead of a range.
    #[arg(long, value_parser = decimal, conflicts_with_all = ["alpha_min", "alpha_max", "alpha_step"])]
    alpha: Option<f64>,
    #[arg(long, value_parser = decimal, default_value = "0")]
    alpha_min: f64,
    #[arg(long, value_parser = decimal, default_value = "0.9")]
    alpha_max: f64,
    #[arg(long, value_parser = decimal, default_value = "0.1")]
    alpha_step: f64,
    /// Single target overlap.
    #[arg(long, value_parser = decimal, group = "target", conflicts_with_all = ["beta_min", "beta_max"])]
    beta: Option<f64>,
    #[arg(long, value_parser = decimal, group = "target", requires = "beta_max")]
    beta_min: Option<f64>,
    #[arg(long, value_parser = decimal, requires = "beta_min")]
    beta_max: Option<f64>,
    #[arg(long, value_parser = decimal, default_value = "0.1")]
    beta_step: f64,
    /// Copies held in the cloning scan.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, group = "copies", requires = "n_max", conflicts_with = "target")]
    n_min: Option<usize>,
    #[arg(long, requires = "n_min")]
    n_max: Option<usize>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Bounds(a) => commands::bounds(a.alpha, a.beta, a.m.zip(a.n)),
        Command::Verify(a) => commands::verify(a.alpha, a.beta),
        Command::Simulate(a) => commands::simulate(&commands::SimulateRequest {
            pipeline: &a.pipeline,
            alpha: a.alpha,
            beta: a.beta,
            m: a.m,
            n: a.n,
            trials: a.trials,
            seed: a.seed,
            state_vector: matches!(a.sampling, SamplingArg::StateVector),
            sequential: a.sequential,
        }),
        Command::Oracle(a) => {
            commands::oracle(a.alpha, a.beta, a.grid, a.refine, a.phases, a.sequential)
        }
        Command::Scan(a) => {
            let alpha = match a.alpha {
                Some(x) => commands::Axis::fixed(x),
                None => commands::Axis::range(a.alpha_min, a.alpha_max, a.alpha_step)?,
            };
            let mode = match (a.beta, a.beta_min.zip(a.beta_max), a.n_min.zip(a.n_max)) {
                (Some(b), _, _) => commands::ScanMode::Beta(commands::Axis::fixed(b)),
                (_, Some((lo, hi)), _) => {
                    commands::ScanMode::Beta(commands::Axis::range(lo, hi, a.beta_step)?)
                }
                (_, _, Some((lo, hi))) => commands::ScanMode::Copies { m: a.m, n: lo..=hi },
                _ => commands::ScanMode::AlphaOnly,
            };
            commands::scan(&alpha, &mode, a.output.as_deref(), cli.format)
        }
    }
}

fn emit(outcome: &Outcome, format: Format) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match (&outcome.table, format) {
        (Some(table), Format::Csv) => write_table(&table.columns, &table.rows, format, &mut out)?,
        _ => write_envelope(&outcome.envelope, format, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| emit(&o, cli.format).map(|()| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: contract check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn decimal_rejects_exponents_and_specials() {
        assert_eq!(decimal("0.5"), Ok(0.5));
        assert_eq!(decimal("-1"), Ok(-1.0));
        assert_eq!(decimal(".25"), Ok(0.25));
        assert_eq!(decimal("3."), Ok(3.0));
        for bad in ["1e-3", "inf", "NaN", "", ".", "0x1", "1,5", "--1"] {
            assert!(decimal(bad).is_err(), "{bad}");
        }
    }
}
