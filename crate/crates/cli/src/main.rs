//! `nctorus`: run a JSON scenario and print a JSON report.
//!
//! Exit codes: 0 on success, 2 for schema or validation errors, 3 when the
//! mathematics refuses the request (non-flat connection, path not closed, ...).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nctorus::scenario::{self, Command, Scenario, BUILTIN_NAMES};
use nctorus::Error;

#[derive(Debug, Parser)]
#[command(
    name = "nctorus",
    version,
    about = "Connections, transports and Wilson lines on the noncommutative torus"
)]
struct Args {
    /// Scenario file (JSON); `-` reads stdin.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    scenario: Option<PathBuf>,

    /// Built-in scenario.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(BUILTIN_NAMES))]
    builtin: Option<String>,

    /// Replace the scenario's command.
    #[arg(long)]
    command: Option<String>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    pretty: bool,
}

fn load(args: &Args) -> Result<Scenario, Error> {
    let mut s = if let Some(name) = &args.builtin {
        scenario::builtin(name).ok_or_else(|| Error::Schema(format!("unknown builtin `{name}`")))?
    } else {
        let path = args.scenario.as_ref().expect("clap enforces one source");
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin())
        } else {
            fs::read_to_string(path)
        }
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
        scenario::parse_scenario(&text)?
    };
    if let Some(cmd) = &args.command {
        s.command = cmd.parse::<Command>()?;
    }
    Ok(s)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|s| scenario::run(&s));
    let (body, code) = match outcome {
        Ok(report) => (scenario::render(&report, args.pretty), 0),
        Err(err) => {
            let code = if err.is_validation() { 2 } else { 3 };
            (
                scenario::render(&scenario::error_report(&err), args.pretty),
                code,
            )
        }
    };
    match &args.out {
        Some(path) if code == 0 => {
            if let Err(e) = fs::write(path, &body) {
                eprintln!("nctorus: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        Some(_) => eprint!("{body}"),
        None if code == 0 => print!("{body}"),
        None => eprint!("{body}"),
    }
    ExitCode::from(code)
}
