//! Library side of the `wavefront-lab` command-line tool.

pub mod commands;
pub mod config;
pub mod error;

use std::path::Path;

pub use config::{parse_config, CommandSpec, ModelSpec, RunConfig};
pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Speeds,
    Solve,
    Verify,
    Sweep,
}

/// Reads the config, applies a seed override and runs the command.
pub fn run(command: Command, config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    match command {
        Command::Speeds => commands::cmd_speeds(&cfg, out),
        Command::Solve => commands::cmd_solve(&cfg, out),
        Command::Verify => commands::cmd_verify(&cfg, out),
        Command::Sweep => commands::cmd_sweep(&cfg, out),
    }
}
