use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use triax_cli::commands::EXIT_INPUT_ERROR;
use triax_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT_ERROR as u8);
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT_ERROR as u8);
            }
        }
        None if !cli.summary => {
            let _ = writeln!(std::io::stdout(), "{text}");
        }
        None => {}
    }
    if cli.summary {
        let _ = writeln!(std::io::stdout(), "{}", outcome.summary);
    }
    ExitCode::from(outcome.exit_code as u8)
}
