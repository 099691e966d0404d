mod args;
mod commands;
mod emit;

use args::{Cli, Format};
use clap::Parser;
use commands::Failure;
use serde_json::json;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = &cli.command;
    let c = cmd.common();
    let report = match commands::run(cmd) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let text = match c.format {
        Format::Json => {
            let doc = json!({
                "version": env!("CARGO_PKG_VERSION"),
                "command": cmd.name(),
                "inputs": commands::inputs(cmd),
                "results": report.results,
                "diagnostics": report.diagnostics,
            });
            let mut s = serde_json::to_string_pretty(&emit::normalize(doc)).expect("json serializes");
            s.push('\n');
            s
        }
        Format::Csv => match report.table.to_csv() {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
    };
    match &c.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if c.format == Format::Csv {
        for d in &report.diagnostics {
            eprintln!("note: {d}");
        }
    }
    if let Some(why) = report.incomplete {
        eprintln!("error: {why}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
