//! Front end for the `qwcage` binary: configs, subcommands and output files.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write as _;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use crate::args::Cli;
use crate::config::{Command, ExperimentConfig};
use crate::output::Artifacts;

/// Fills defaults, validates and runs one command in a pool of the
/// configured size.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Artifacts> {
    let mut cfg = cfg.clone();
    cfg.fill_defaults(cmd);
    cfg.validate(cmd)?;
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building the worker pool")?;
            pool.install(|| commands::execute(cmd, &cfg))
        }
        None => commands::execute(cmd, &cfg),
    }
}

fn main_inner(cli: Cli) -> Result<()> {
    let (cmd, flags) = cli.command.split();
    let mut cfg = flags.resolve()?;
    if flags.print_config {
        cfg.fill_defaults(cmd);
        cfg.validate(cmd)?;
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(());
    }
    let art = run(cmd, &cfg)?;
    let stderr = std::io::stderr();
    let mut err = stderr.lock();
    match &cfg.out {
        Some(out) => {
            for p in art.write_all(out)? {
                writeln!(err, "wrote {}", p.display())?;
            }
        }
        None => {
            std::io::stdout().write_all(art.primary.contents.as_bytes())?;
        }
    }
    for line in &art.summary {
        writeln!(err, "{line}")?;
    }
    Ok(())
}

/// Entry point of the binary.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
