//! `workbench`: classify nodes, price payoffs, check conditions and build
//! martingale measures from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 internal
//! invariant violation.

mod commands;

use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathwise_core::workbench::Format;

#[derive(Debug, Parser)]
#[command(
    name = "workbench",
    version,
    about = "Exact superhedging workbench for trajectory sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Instance JSON file.
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "scenario")]
    pub instance: Option<PathBuf>,
    /// Built-in scenario (SCN-A .. SCN-E).
    #[arg(long, global = true, value_name = "ID")]
    pub scenario: Option<String>,
    /// Family truncation N.
    #[arg(long = "N", global = true, value_name = "n")]
    pub truncation: Option<usize>,
    /// Maturity cap M (defaults to the exact regime for scenarios).
    #[arg(long = "M", global = true, value_name = "m")]
    pub maturity_cap: Option<usize>,
    /// Payoff expression, e.g. "abs(S[1] - 1)".
    #[arg(long, global = true, value_name = "EXPR")]
    pub payoff: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Txt)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Md,
    Txt,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Md => Format::Md,
            OutputFormat::Txt => Format::Txt,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-node classification table.
    Classify,
    /// Null set with per-class certificates.
    Nullset,
    /// Price a payoff.
    Price {
        #[arg(long, value_enum)]
        op: PriceOp,
    },
    /// Check a market condition.
    Check {
        #[arg(long, value_enum)]
        condition: Condition,
        /// Seed for the randomized part of the (K) sample.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random payoffs in the (K) sample.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Martingale measures.
    Martingale {
        #[arg(long, value_enum)]
        action: MartingaleAction,
        /// Measure JSON (label -> "p/q"); repeatable for `bounds`.
        #[arg(long, value_name = "FILE")]
        measure: Vec<PathBuf>,
        /// Write the constructed measure as JSON.
        #[arg(long, value_name = "FILE")]
        save: Option<PathBuf>,
        /// Let the dual price charge null classes too.
        #[arg(long)]
        all_classes: bool,
    },
    /// Price one payoff across regimes.
    Sweep {
        /// Regime as `M,N`; repeatable.
        #[arg(long = "regime", value_name = "M,N", required = true, value_parser = parse_regime)]
        regimes: Vec<(usize, usize)>,
    },
    /// Markdown dossier of the instance.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriceOp {
    Replicate,
    Ibar,
    Sigmabar,
    Sigmaunder,
    Norm,
    #[value(name = "integralK")]
    IntegralK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    Lop,
    Mon,
    #[value(name = "L")]
    L,
    #[value(name = "nL")]
    NL,
    #[value(name = "K")]
    K,
    #[value(name = "nK-sufficient")]
    NKSufficient,
    Complete,
    StrictMia,
    NullArbitrage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MartingaleAction {
    Construct,
    Verify,
    Expect,
    Dual,
    Bounds,
}

fn parse_regime(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(',')
        .ok_or_else(|| format!("expected M,N, got `{s}`"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("not a nonnegative integer: `{v}`"))
    };
    Ok((parse(m)?, parse(n)?))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl From<pathwise_core::Error> for CliError {
    fn from(e: pathwise_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WORKBENCH_THREADS") else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "WORKBENCH_THREADS must be a positive integer, got `{raw}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    panic::set_hook(Box::new(|info| {
        let message = info
            .payload()
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| info.payload().downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        eprintln!("internal invariant violated: {message}");
    }));

    let outcome = panic::catch_unwind(|| {
        configure_threads()?;
        let text = commands::run(&cli)?;
        emit(&cli, &text)
    });
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CliError::Usage(msg))) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(CliError::Input(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(3),
    }
}
