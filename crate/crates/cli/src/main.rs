use std::process::ExitCode;

use clap::Parser;
use clmm_lab_cli::{cli::Cli, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            for c in &outcome.checks {
                println!(
                    "{:<4} {:<40} measured {:<24} tolerance {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance
                );
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
