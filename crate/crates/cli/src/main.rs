mod args;
mod commands;
mod evals;
mod report;
mod verify;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};

fn run(cli: Cli) -> Result<bool> {
    let common = cli.command.common();
    let threads = if common.deterministic { 1 } else { common.threads.max(1) };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();
    match cli.command {
        Command::Count(a) => commands::cmd_count(a).map(|_| true),
        Command::Train(a) => commands::cmd_train(a).map(|_| true),
        Command::Center(a) => commands::cmd_center(a).map(|_| true),
        Command::Verify(a) => verify::cmd_verify(a),
        Command::Query(a) => commands::cmd_query(a).map(|_| true),
        Command::Eval(a) => evals::cmd_eval(a).map(|_| true),
        Command::SynthOr(a) => commands::cmd_synth_or(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        // a verify check ran to completion but its tolerance failed
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
