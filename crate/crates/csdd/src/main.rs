use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use csdd::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(body) => {
            let text = serde_json::to_string_pretty(&body).expect("serializable");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
