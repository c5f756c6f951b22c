mod args;
mod commands;
mod config;
mod error;
mod table;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::Config;
use error::{CliError, EXIT_USAGE};

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = Config::resolve(&cli.global)?;
    let text = match &cli.command {
        Command::Coords { dir } => commands::coords(dir, &cfg)?,
        Command::Omega(a) => commands::omega(a, &cfg)?,
        Command::Eigen(a) => commands::eigen(a, &cfg)?,
        Command::Harmonic { cmd } => commands::harmonic_cmd(cmd, &cfg)?,
        Command::Surface(a) => commands::surface(a, &cfg)?,
        Command::Solve(a) => commands::solve(a, &cfg)?,
        Command::Verify(a) => commands::verify(a, &cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::usage(e.render().to_string().trim());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
