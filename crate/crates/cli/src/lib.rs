//! Command-line front end: configuration layering, tick ingestion,
//! subcommand dispatch and CSV / SVG output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod ticks;
pub mod verify;

use std::fs;
use std::path::PathBuf;

use crate::cli::{ArbMode, Cli, Command};
use crate::commands::Artifacts;
use crate::config::{load_file, Params, OUT_ENV};
use crate::error::{io_err, CliResult};
use crate::output::write_svg;
use crate::verify::{report_table, run_checks, Check};

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => Params::default(),
    };
    let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
    let eff = cli.params.over(file).resolve(cli.command.name(), env_out);

    let mut checks = Vec::new();
    let artifacts = match cli.command {
        Command::Pool => commands::pool(&eff)?,
        Command::Position => commands::position(&eff)?,
        Command::Sim => commands::sim(&eff)?,
        Command::Arb { mode } => match mode {
            ArbMode::Myopic => commands::arb_myopic(&eff)?,
            ArbMode::Finite => commands::arb_finite(&eff)?,
            ArbMode::Discounted => commands::arb_discounted(&eff)?,
            ArbMode::Ergodic => commands::arb_ergodic(&eff)?,
        },
        Command::Verify => {
            checks = run_checks(eff.seed)?;
            Artifacts {
                tables: vec![report_table(&checks)],
                charts: Vec::new(),
            }
        }
    };

    fs::create_dir_all(&eff.out).map_err(io_err(&eff.out))?;
    let mut files = Vec::new();
    let echo = eff.out.join("effective_config.toml");
    fs::write(&echo, eff.to_toml()).map_err(io_err(&echo))?;
    files.push(echo);
    for t in &artifacts.tables {
        files.push(t.write_csv(&eff.out)?);
    }
    if eff.svg {
        for (name, svg) in &artifacts.charts {
            // plots never decide the exit status
            if let Ok(path) = write_svg(&eff.out, name, svg) {
                files.push(path);
            }
        }
    }
    Ok(Outcome {
        out_dir: eff.out,
        files,
        checks,
    })
}
