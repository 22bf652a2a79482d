//! File formats and command-line pipelines for `lpc-enhance-core`: WAV
//! input/output, CSV and JSON reports, corpus manifests and the
//! `lpc-enhance` subcommands.

pub mod args;
mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod tables;
pub mod wav;

use std::ffi::OsString;

use clap::Parser;

pub use error::{CliError, CliResult};

/// Parse `argv` (program name first), run the subcommand and return the
/// process exit code: 0 on success, 1 on invalid input, 2 on failure.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
