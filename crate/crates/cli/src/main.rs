use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cnnpart_cli::{run, Cli};

fn main() -> ExitCode {
    // Usage errors exit with 2 from inside clap.
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
