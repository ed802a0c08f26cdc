use std::io::Write;

use clap::Parser;
use infra1d_cli::args::Cli;
use infra1d_cli::{exit, run};

fn main() {
    let cli = Cli::parse();
    let cfg = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit::INVALID_INPUT);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            // a closed pipe is not an error of the run
            let _ = writeln!(std::io::stdout(), "{text}");
            if let Some(err) = &report.error {
                eprintln!("error: {}", err.message);
            }
            std::process::exit(report.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit::RUNTIME);
        }
    }
}
