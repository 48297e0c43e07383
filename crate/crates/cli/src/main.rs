//! `discop`: build the discrete operator, print its tables and roots, and
//! check its convolution identities.
//!
//! Exit codes: 0 success, 1 verification failed, 2 bad arguments or guard,
//! 3 numerical failure (a JSON error body is printed).

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct(a) => commands::construct_cmd(a),
        Command::Table(a) => commands::table_cmd(a),
        Command::Verify(a) => commands::verify_cmd(a),
        Command::Roots(a) => commands::roots_cmd(a),
        Command::Euler(a) => commands::euler_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verification => eprintln!("verification failed"),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Numerical(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}
