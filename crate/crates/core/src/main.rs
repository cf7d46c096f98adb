use std::process::ExitCode;

use clap::Parser;
use epac_kit::cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            for check in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "FAIL {}: {}",
                    check.name,
                    check.detail.as_deref().unwrap_or("")
                );
            }
            for file in &report.files {
                println!("{}", file.display());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
