mod config;
mod error;
mod output;
mod run;

use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::Parser;

use config::Cli;
use error::CliError;
use output::{Metadata, SweepResult};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match go(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn go(cli: &Cli) -> Result<(), CliError> {
    let rows = run::execute(cli)?;
    let result = SweepResult {
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION"),
            seed: cli.seed,
            date: chrono::Utc::now().to_rfc3339(),
            command: std::env::args().skip(1).collect(),
        },
        rows,
    };
    match &cli.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            result.write(cli.format, BufWriter::new(file))
        }
        None => result.write(cli.format, io::stdout().lock()),
    }
}
