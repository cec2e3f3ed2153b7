#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Library side of the `riesz` binary: argument parsing, dispatch and
//! report output, exposed so integration tests can drive it in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod nodes;
pub mod report;

use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use commands::Cli;
pub use error::CliError;
pub use report::{validate_report, Format, Report};

/// Parses `args` (including the program name), runs the command and writes
/// the report. Returns the process exit status.
pub fn run_with_args(args: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match config::merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(failed) => i32::from(failed),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let report = commands::dispatch(&cli.command)?;
    emit(&report, cli.format.into(), cli.output.as_deref(), stdout)
}

/// Writes the rendered report and returns whether it counts as failed.
fn emit(
    report: &Report,
    format: Format,
    output: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<bool, CliError> {
    let text = report.render(format)?;
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(report.failed)
}
