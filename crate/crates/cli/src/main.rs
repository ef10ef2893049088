use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    imt::cli::run(imt::cli::Cli::parse())
}
