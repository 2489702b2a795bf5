use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use riccati_kyp::cli::{error_report, parse_inputs, parse_system, run, Command, Report, RunConfig};
use riccati_kyp::Error;

/// Exit code for malformed command lines; library errors use 2 and up.
const USAGE_EXIT: u8 = 1;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Analyze,
    Check,
    SolveRe,
    Extremes,
    Simulate,
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Analyze => Command::Analyze,
            Cmd::Check => Command::Check,
            Cmd::SolveRe => Command::SolveRe,
            Cmd::Extremes => Command::Extremes,
            Cmd::Simulate => Command::Simulate,
            Cmd::Report => Command::Report,
        }
    }
}

/// Riccati and KYP analysis of discrete-time systems.
#[derive(Debug, Parser)]
#[command(name = "riccati-kyp", version)]
struct Args {
    command: Cmd,
    /// System document (JSON).
    #[arg(long)]
    system: PathBuf,
    /// Candidate name for `check`.
    #[arg(long)]
    candidate: Option<String>,
    /// Input sequence for `simulate` (JSON with `x0` and `inputs`).
    #[arg(long)]
    inputs: Option<PathBuf>,
    /// Verdict tolerance; the rank, definiteness and minimality thresholds
    /// are scaled from it.
    #[arg(long)]
    tol: Option<f64>,
    /// Points on the unit circle.
    #[arg(long, default_value_t = riccati_kyp::analysis::DEFAULT_GRID_STEPS)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timings: bool,
}

fn execute(args: &Args) -> Report {
    let mut config = RunConfig {
        grid_steps: args.grid,
        candidate: args.candidate.clone(),
        inputs: args.inputs.as_ref().map(|p| p.display().to_string()),
        timings: !args.no_timings,
        ..RunConfig::default()
    }
    .with_seed(args.seed);
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return error_report(&Error::InvalidArgument(format!("--tol must be positive, got {tol}")));
        }
        config = config.with_tol(tol);
    }
    let doc = match parse_system(&args.system) {
        Ok(d) => d,
        Err(e) => return error_report(&e),
    };
    let inputs = match args.inputs.as_deref().map(parse_inputs).transpose() {
        Ok(i) => i,
        Err(e) => return error_report(&e),
    };
    run(args.command.into(), &doc, inputs.as_ref(), &config)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = execute(&args);
    let text = report.to_json();
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let err = Error::Io(format!("{}: {e}", path.display()));
                print!("{}", error_report(&err).to_json());
                return ExitCode::from(err.code() as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code as u8)
}
