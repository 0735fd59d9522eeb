mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Failure::Params(String::new()).exit_code()),
            };
        }
    };
    let result = match &cli.command {
        Command::Series(args) => commands::series(args),
        Command::WitnessScan(args) => commands::witness_scan_cmd(args),
        Command::StaticScan(args) => commands::static_scan(args),
        Command::EnvironmentCompare(args) => commands::environment_compare(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
