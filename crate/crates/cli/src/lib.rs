//! Library side of the `gausslocal` binary: config, commands and reports.

pub mod config;
pub mod measure_cmd;
pub mod op_cmd;
pub mod report;
pub mod resolve;
pub mod verify_cmd;
pub mod weights_cmd;

use config::RunConfig;
use report::{Record, ReportBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Measure,
    Weights,
    Op,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Measure => "measure",
            Command::Weights => "weights",
            Command::Op => "op",
            Command::Verify => "verify",
        }
    }
}

/// Runs one command on a validated config.
pub fn execute(command: Command, cfg: &RunConfig) -> anyhow::Result<ReportBundle> {
    let records: Vec<Record> = match command {
        Command::Measure => measure_cmd::run(cfg)?,
        Command::Weights => weights_cmd::run(cfg)?,
        Command::Op => op_cmd::run(cfg)?,
        Command::Verify => verify_cmd::run(cfg)?,
    };
    Ok(ReportBundle::new(
        command.name(),
        &cfg.hash(),
        cfg.seed,
        records,
    ))
}
