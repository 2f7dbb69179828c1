//! Command-line front end. Filled in as the subsystems land.

use std::process::ExitCode;

pub fn run(args: &[String]) -> ExitCode {
    let _ = args;
    eprintln!("condikit: not wired up yet");
    ExitCode::from(64)
}
