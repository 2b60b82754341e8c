use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use carmen_cli::{render, run, Cli, CliError};
use carmen_core::Caps;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let caps = Caps::from_env()?;
    let outcome = run(cli, &caps)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let text = render(&outcome.report, cli.opts.format)?;
    match &cli.opts.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    Ok(outcome.status.exit_code())
}
