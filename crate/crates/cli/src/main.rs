use std::process::ExitCode;

use clap::Parser;
use zeta_ladder_cli::Cli;

fn main() -> ExitCode {
    zeta_ladder_cli::main_with(&Cli::parse())
}
