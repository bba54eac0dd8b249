mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "roa", version, about = "Learn inner approximations of regions of attraction")]
struct Cli {
    /// Worker threads for grid and verification runs (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the learner and write result, stats and export files.
    Learn {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `learner.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label the configured grid by simulation and write `grid.csv`.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probe a set for recurrence; exits 2 if any probe fails.
    Verify {
        /// `set.json` or `result.json`.
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Trajectory length; defaults to the final `k` of a result file,
        /// else `learner.k`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count grid nodes inside a set by label.
    Compare {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
    Version,
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Learn { config, seed, out } => commands::learn_cmd(&config, seed, out),
        Command::Grid { config, out } => commands::grid_cmd(&config, out),
        Command::Verify { set, config, k, seed } => commands::verify_cmd(&set, &config, k, seed),
        Command::Compare { set, grid } => commands::compare_cmd(&set, &grid),
        Command::Version => {
            println!("roa {}", env!("CARGO_PKG_VERSION"));
            Ok(commands::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
