use std::process::ExitCode;

use clap::Parser;
use jumpdet::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    run(&Cli::parse())
}
