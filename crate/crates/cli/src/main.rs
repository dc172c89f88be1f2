use std::process::ExitCode;

use clap::Parser;
use ngforge_cli::commands::Cli;

fn main() -> ExitCode {
    match ngforge_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
