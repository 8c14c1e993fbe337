use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use skqd::bounds::Grid;
use skqd::experiment::config::VerifyBounds;
use skqd::experiment::{run_to_dir, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(
    name = "skqd",
    version,
    about = "Sample-based Krylov diagonalization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads (falls back to SKQD_THREADS).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Run every bound verifier and write a JSON report.
    VerifyBounds {
        #[arg(long, value_enum, default_value_t = GridArg::Small)]
        grid: GridArg,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Small,
    Full,
}

fn execute(cli: Cli) -> skqd::Result<usize> {
    let (config, opts, out) = match cli.command {
        Command::Run {
            config,
            out,
            threads,
            seed_override,
        } => {
            let text = std::fs::read_to_string(&config)?;
            (
                ExperimentConfig::from_json(&text)?,
                RunOptions {
                    threads,
                    seed_override,
                },
                out,
            )
        }
        Command::VerifyBounds {
            grid,
            out,
            threads,
            seed,
        } => {
            let grid = match grid {
                GridArg::Small => Grid::Small,
                GridArg::Full => Grid::Full,
            };
            (
                ExperimentConfig::VerifyBounds(VerifyBounds { grid, seed }),
                RunOptions {
                    threads,
                    seed_override: None,
                },
                out,
            )
        }
    };
    let (result, files) = run_to_dir(&config, &opts, &out)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    println!(
        "{} rows, {} violations",
        result.table.rows.len(),
        result.violations
    );
    Ok(result.violations)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(v) => {
            eprintln!("error: {v} inequality violations");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
