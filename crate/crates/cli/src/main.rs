//! `nsf`: run, verify, sweep and export Galerkin simulations of the
//! heat-conducting fluid model.
//!
//! Exit codes: 0 success, 1 input/format/checksum error, 2 solver failure,
//! 3 failed verification check.

mod commands;
mod outputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser)]
#[command(name = "nsf", version, about = "Galerkin solver and verifier for a heat-conducting fluid with temperature-dependent viscosity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write dumps, ledger and manifest
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Intervals per direction of the plot-snapshot grid
        #[arg(long, default_value_t = 32)]
        plot_grid: usize,
    },
    /// Check the local and global inequalities on a completed run
    Verify {
        dir: PathBuf,
        #[arg(long, default_value_t = 32)]
        cutoffs: usize,
        #[arg(long, default_value_t = 64)]
        cylinders: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,0.1,0.01")]
        zeta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        xi: Vec<f64>,
        /// Higher-integrability exponent
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Reverse Hoelder exponent
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Sampling seed (defaults to the scenario seed)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario over a list of parameter values and tabulate the
    /// differences between consecutive runs
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-serialize field snapshots as CSV matrices
    ExportPlots {
        dir: PathBuf,
        /// Keep every k-th level
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Regenerate a reference value from an independent oracle
    Oracle {
        #[arg(value_enum)]
        name: OracleName,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Problem size (grid intervals or modes, oracle dependent)
        #[arg(long)]
        size: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepParam {
    Nu,
    Eps,
    #[value(name = "N")]
    N,
    #[value(name = "M")]
    M,
    Dt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleName {
    Neumann,
    Quadrature,
    Ode,
    Manufactured,
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("NSF_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::input(format!("NSF_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(CliError::input("NSF_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::input(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { scenario, out, plot_grid } => commands::run(&scenario, &out, plot_grid),
        Command::Verify { dir, cutoffs, cylinders, zeta, xi, eps, delta, seed } => {
            commands::verify(&dir, commands::VerifyArgs { cutoffs, cylinders, zeta, xi, eps, delta, seed })
        }
        Command::Sweep { scenario, param, values, out } => {
            let key = match param {
                SweepParam::Nu => "nu",
                SweepParam::Eps => "eps",
                SweepParam::N => "N",
                SweepParam::M => "M",
                SweepParam::Dt => "dt",
            };
            commands::sweep(&scenario, key, &values, &out)
        }
        Command::ExportPlots { dir, every } => commands::export_plots(&dir, every),
        Command::Oracle { name, seed, size } => {
            let name = match name {
                OracleName::Neumann => "neumann",
                OracleName::Quadrature => "quadrature",
                OracleName::Ode => "ode",
                OracleName::Manufactured => "manufactured",
            };
            commands::oracle(name, seed, size)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
