//! Command-line runner for `levy-spde-core`: configuration, subcommands,
//! reports and the acceptance suite.
//!
//! The exit code is 0 exactly when no check failed; inconclusive and
//! unsupported checks are not failures. Module errors become failed checks,
//! and only configuration or I/O problems end the run early, with code 2.

pub mod acceptance;
pub mod args;
pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

use crate::args::{Cli, Command, Format};
use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::report::Status;

pub use config::{ConfigError, RunConfig as Config};
pub use report::{Check, Report};

/// Exit code for configuration, usage and I/O errors.
pub const EXIT_USAGE: i32 = 2;

/// Runs the configured command.
pub fn execute(command: &Command, config: &RunConfig) -> Outcome {
    match command {
        Command::Dalang { sweep, .. } => commands::dalang(config, *sweep),
        Command::NoiseCheck { .. } => commands::noise_check(config),
        Command::Simulate { .. } => commands::simulate(config),
        Command::Jp { .. } => commands::jp(config),
        Command::Chaos { .. } => commands::chaos(config),
        Command::Acceptance { .. } => Outcome { report: acceptance::run(config), table: None },
    }
}

/// Parses `args`, runs the command, writes its outputs and returns the exit
/// code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        },
        None => RunConfig::default(),
    };
    cli.apply(&mut config);
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let outcome = execute(&cli.command, &config);
    let default_format = if outcome.table.is_some() { Format::Csv } else { Format::Json };
    if let Err(e) = emit(&outcome, cli.format.unwrap_or(default_format), cli.out.as_deref(), &config) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    summarize(&outcome);
    outcome.report.exit_code()
}

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => outcome.report.to_json(),
        Format::Csv => outcome.table.clone().unwrap_or_else(|| outcome.report.check_table()).to_csv(),
    }
}

fn write_file(path: &Path, text: &str) -> std::io::Result<()> {
    std::fs::write(path, text).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Writes the chosen format to `--out` or standard output, plus any output
/// files named in the config.
fn emit(outcome: &Outcome, format: Format, out: Option<&Path>, config: &RunConfig) -> std::io::Result<()> {
    let text = render(outcome, format);
    match out {
        Some(path) => write_file(path, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if let Some(path) = &config.output.csv {
        write_file(path, &render(outcome, Format::Csv))?;
    }
    if let Some(path) = &config.output.json {
        write_file(path, &render(outcome, Format::Json))?;
    }
    Ok(())
}

fn summarize(outcome: &Outcome) {
    let report = &outcome.report;
    let mut err = std::io::stderr().lock();
    for c in &report.checks {
        if c.status != Status::Pass {
            let _ = writeln!(err, "[{}] {} {}", c.status.name(), c.check_id, c.detail);
        }
    }
    let s = report.summary;
    let _ = writeln!(
        err,
        "{}: {} pass, {} fail, {} inconclusive, {} unsupported",
        report.command, s.pass, s.fail, s.inconclusive, s.unsupported
    );
}
