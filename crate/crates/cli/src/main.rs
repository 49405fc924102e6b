mod args;
mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, Format};

/// Failure reported as a JSON record on standard error.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage", message: message.into() }
    }

    pub fn io(e: io::Error) -> Self {
        let kind = if e.kind() == io::ErrorKind::BrokenPipe { "broken_pipe" } else { "io" };
        Self { kind, message: e.to_string() }
    }
}

impl From<bootperc::Error> for CliError {
    fn from(e: bootperc::Error) -> Self {
        Self { kind: e.kind(), message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command produces.
pub enum Artifact {
    /// A JSON object or array; objects are merged into the top level.
    Json(Value),
    /// Sweep rows for CSV output, with the JSON equivalent.
    Sweep(Vec<bootperc::montecarlo::SweepRow>),
}

fn provenance(command: &Command) -> Value {
    json!({
        "tool": "bootperc",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "params": serde_json::to_value(command).unwrap_or(Value::Null),
        "seed": command.seed(),
    })
}

fn render(artifact: Artifact, format: Format, prov: Value, out: &mut dyn Write) -> CliResult<()> {
    match (artifact, format) {
        (Artifact::Sweep(rows), Format::Csv) => {
            // provenance as comment lines ahead of the fixed header
            let text = serde_json::to_string(&prov).map_err(|e| CliError::usage(e.to_string()))?;
            writeln!(out, "# {text}").map_err(CliError::io)?;
            bootperc::montecarlo::write_sweep_csv(&rows, &mut *out)?;
            Ok(())
        }
        (_, Format::Csv) => Err(CliError::usage("csv output is only available for sweep")),
        (artifact, Format::Json) => {
            let body = match artifact {
                Artifact::Json(v) => v,
                Artifact::Sweep(rows) => json!({ "rows": rows }),
            };
            let mut doc = match body {
                Value::Object(mut map) => {
                    map.insert("provenance".into(), prov);
                    Value::Object(map)
                }
                other => json!({ "provenance": prov, "rows": other }),
            };
            bootperc::output::round_json(&mut doc);
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::io(e.into()))?;
            writeln!(out).map_err(CliError::io)
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let artifact = commands::dispatch(&cli.command)?;
    let prov = provenance(&cli.command);
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(CliError::io)?);
            render(artifact, cli.format, prov, &mut w)?;
            w.flush().map_err(CliError::io)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            render(artifact, cli.format, prov, &mut lock)
        }
    }
}

fn report(err: &CliError, command: Option<&Command>) {
    let record = json!({
        "error": { "kind": err.kind, "message": err.message },
        "provenance": command.map(provenance),
    });
    eprintln!("{record}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&CliError::usage(e.render().to_string().trim_end()), None);
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        // the reader went away; nothing left to report to
        Err(e) if e.kind == "broken_pipe" => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, Some(&cli.command));
            ExitCode::from(if e.kind == "usage" { 2 } else { 1 })
        }
    }
}
