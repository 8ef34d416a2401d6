use std::process::ExitCode;

use clap::Parser;
use uwe_cli::{run, Args, CliError, RunConfig};

fn main() -> ExitCode {
    let args = Args::parse();
    match RunConfig::from_args(args).and_then(|config| {
        let text = run(&config)?;
        match &config.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uwe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
