//! Command-line runner for the CIR/log-Heston strong-convergence
//! experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{resolve, CommonArgs, PriceArgs};

const AFTER_HELP: &str = "\
CSV schemas (stable):
  errors.csv  scheme,model,N,M,err_v,se_v,err_x,se_x,seed
  rates.csv   scheme,model,target,slope,intercept,fit_min_N,fit_max_N
  bias.csv    payoff,scheme,model,N,bias,se,seed
  plot.csv    scheme,model,log2_N,log2_err_v,log2_err_x

Profiles: desk (default) M=10^4, N<=2^12; paper M=10^5, N<=2^15 (long-running).
The master seed defaults to 0; every run is reproducible from flags, config
file and seed alone, independent of --threads.";

#[derive(Parser)]
#[command(name = "cirheston", version, about = "Euler schemes for the CIR and log-Heston SDEs: strong-convergence measurement", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in models with their Feller indices
    Models,
    /// Measure coupled-path errors and fit convergence rates
    Converge(CommonArgs),
    /// Measure payoff bias across grid resolutions
    Price(PriceArgs),
    /// Compare the discrete Brownian-maximum gap with its asymptotic
    CalibrateBm(CommonArgs),
}

/// Failures carry the exit class: usage (1) or runtime (2).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

fn set_thread_cap(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Runtime(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Usage(e.to_string())),
    };

    match &cli.command {
        Command::Models => {
            commands::cmd_models();
            Ok(())
        }
        Command::Converge(args) => {
            let cfg = resolve("converge", args, None)?;
            if args.print_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            set_thread_cap(cfg.threads)?;
            commands::cmd_converge(&cfg)
        }
        Command::Price(args) => {
            let cfg = resolve("price", &args.common, Some(args))?;
            if args.common.print_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            set_thread_cap(cfg.threads)?;
            commands::cmd_price(&cfg)
        }
        Command::CalibrateBm(args) => {
            let cfg = resolve("calibrate-bm", args, None)?;
            if args.print_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            set_thread_cap(cfg.threads)?;
            commands::cmd_calibrate_bm(&cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
