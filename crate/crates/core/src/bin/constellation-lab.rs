use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use constellation_core::cli::{exit_code, run, RunFlags, Subcommand, EXIT_INPUT};
use constellation_core::problem::parse_problem;
use constellation_core::rational::{parse_rational, Q};

/// Exact stability computations for equivariant constellations.
#[derive(Debug, Parser)]
#[command(name = "constellation-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Subcommand,
    /// Problem file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Canonical window radius, or the largest radius tried by choose-window.
    #[arg(long)]
    window: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Error bound as p/q.
    #[arg(long, value_parser = bound)]
    bound: Option<Q>,
    /// Largest number of candidates enumerated before giving up.
    #[arg(long)]
    cap: Option<usize>,
    /// Add wall-clock time to the report.
    #[arg(long)]
    timing: bool,
}

fn bound(text: &str) -> Result<Q, String> {
    parse_rational(text).ok_or_else(|| format!("`{text}` is not a rational p/q"))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let problem = match (&args.input, args.command.needs_input()) {
        (Some(path), _) => match parse_problem(path) {
            Ok(p) => Some(p),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(exit_code(&e) as u8);
            }
        },
        (None, true) => {
            eprintln!("{} needs --input", args.command);
            return ExitCode::from(EXIT_INPUT as u8);
        }
        (None, false) => None,
    };
    let flags =
        RunFlags { seed: args.seed, window: args.window, bound: args.bound, cap: args.cap, timing: args.timing };
    match run(args.command, problem.as_ref(), &flags) {
        Ok(report) => {
            let _ = std::io::stdout().lock().write_all(report.render().as_bytes());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
