use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ris_cli::Cli::parse();
    match ris_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
