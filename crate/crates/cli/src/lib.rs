//! The `netpulse` command: headless training runs, trace validation,
//! dataset inspection and prediction.
//!
//! Exit codes: 0 success, 1 trace violation, 2 configuration or input
//! error, 3 data, parse or file error.

pub mod args;
pub mod commands;
pub mod error;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, CommandArgs};
pub use crate::error::{exit, CliError};

/// Parse `argv` (program name first), run the command, and return the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                exit::CONFIG
            } else {
                let _ = write!(out, "{text}");
                exit::OK
            };
        }
    };
    let result = match &cli.command {
        CommandArgs::Train(a) => commands::train(a, out),
        CommandArgs::Validate(a) => commands::validate(a, out),
        CommandArgs::Inspect(a) => commands::inspect(a, out),
        CommandArgs::Predict(a) => commands::predict(a, out),
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
