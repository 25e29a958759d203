use std::process::ExitCode;

use anyon_cli::{configure_threads, run, Cli, RunConfig, EXIT_ERROR};
use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_ERROR,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<i32> {
    configure_threads()?;
    let cfg = RunConfig::from_cli(cli)?;
    let outcome = run(&cfg)?;
    outcome.dataset.write(cfg.format, cfg.out.as_deref())?;
    if cfg.command == anyon_cli::Command::Verify {
        let passed = outcome.dataset.meta["summary"]["passed"].as_bool().unwrap_or(false);
        eprintln!(
            "verify: {} (max deviation {:e})",
            if passed { "passed" } else { "FAILED" },
            outcome.dataset.meta["summary"]["max_deviation"].as_f64().unwrap_or(f64::NAN)
        );
    }
    Ok(outcome.exit_code)
}
