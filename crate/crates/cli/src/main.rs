use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use parabolic_iss_cli::{run_file, Command, Overrides};

/// Spectral gains, simulation and estimate certificates for 1-D parabolic PDEs.
#[derive(Debug, Parser)]
#[command(name = "parabolic-iss", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Simulation grid intervals.
    #[arg(long)]
    grid: Option<usize>,
    /// Absolute certificate tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if args.grid == Some(0) {
        eprintln!("error: --grid must be positive");
        return ExitCode::from(2);
    }
    let code = run_file(args.command, &args.scenario, &args.out, Overrides { grid: args.grid, tol: args.tol });
    ExitCode::from(code as u8)
}
