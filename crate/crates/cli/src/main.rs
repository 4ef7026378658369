use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wavefront_lab::{run, Command};

#[derive(Parser)]
#[command(
    name = "wavefront-lab",
    version,
    about = "Wave speeds and profiles for non-local delayed reaction-diffusion equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Characteristic roots, c* and the uniqueness threshold over a speed grid.
    Speeds(Common),
    /// Solve for one profile at `command.c`.
    Solve(Common),
    /// Two-seed uniqueness experiment, hypothesis checks and a sweep below c*.
    Verify(Common),
    /// Solve at every speed of `command.sweep`.
    Sweep(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("WAVEFRONT_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let (command, args) = match cli.command {
        Cmd::Speeds(a) => (Command::Speeds, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    match run(command, &args.config, &args.out, args.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wavefront-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
