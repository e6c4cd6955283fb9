use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use discone::document::load_problem;
use discone::error::{exit, CliError};
use discone::run::{run, Command, Mode, Options};
use discone_core::analysis::{Limits, DEFAULT_MAX_GENERATORS};
use discone_core::exactla::{int, parse_rat, Rat};

/// Exact certification of constraint qualifications and optimality
/// conditions for programs with disjunctive constraints.
#[derive(Debug, Parser)]
#[command(name = "discone", version)]
struct Args {
    /// check-licq, stationarity, second-order, oracle, full-report or encode-dump
    #[arg(value_parser = parse_command)]
    command: Command,

    /// Problem file (JSON)
    #[arg(long)]
    problem: PathBuf,

    /// Evaluation point name; every point in the file when omitted
    #[arg(long)]
    point: Option<String>,

    /// Second-order mode: necessary or sufficient
    #[arg(long, default_value = "necessary", value_parser = parse_mode)]
    mode: Mode,

    /// Grid radius for the oracles, e.g. 1/2
    #[arg(long, default_value = "1/2", value_parser = parse_radius)]
    grid_radius: Rat,

    /// Grid points per axis (odd, at least 3)
    #[arg(long, default_value_t = 5)]
    grid_points: usize,

    /// Write the JSON report to this file ("-" for standard output)
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,

    /// Cap on generators fed to the copositivity test
    #[arg(long, env = "DISCONE_MAX_GENERATORS", default_value_t = DEFAULT_MAX_GENERATORS)]
    max_generators: usize,

    /// Worker threads (defaults to the number of cores)
    #[arg(long, env = "DISCONE_THREADS")]
    threads: Option<usize>,
}

fn parse_command(s: &str) -> Result<Command, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_radius(s: &str) -> Result<Rat, String> {
    match parse_rat(s) {
        Some(r) if r > int(0) => Ok(r),
        _ => Err(format!("\"{s}\" is not a positive rational")),
    }
}

fn execute(args: Args) -> Result<i32, CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let doc = load_problem(&args.problem)?;
    let opts = Options {
        mode: args.mode,
        grid_radius: args.grid_radius,
        grid_points: args.grid_points,
        limits: Limits {
            max_generators: args.max_generators,
        },
    };
    let report = run(args.command, &doc, args.point.as_deref(), &opts)?;
    match &args.json {
        Some(path) if path.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(path) => {
            std::fs::write(path, report.to_json()).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_text()),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => exit::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("discone: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
