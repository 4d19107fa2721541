//! `lisdist` command-line front end.
//!
//! Exit status: 0 on success, 2 for usage errors (bad flags, out-of-domain
//! arguments), 3 for numerical failures. Errors are written to stderr as a
//! JSON object `{"error": {"kind", "message"}}`.

mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::{error_json, run, CliError};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", error_json(kind, message.trim_end()));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", &e.render().to_string(), EXIT_USAGE),
    };
    match run(&cli.command) {
        Ok(report) => {
            let text = report.render(cli.format, cli.precision);
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => fail("usage", &msg, EXIT_USAGE),
        Err(CliError::Numerical(msg)) => fail("numerical", &msg, EXIT_NUMERICAL),
    }
}
