//! Command-line demos on top of the sek3 library: dead reckoning from a
//! velocity log, point-cloud registration, and a closed-form identity
//! checker.
//!
//! Exit codes: 0 success, 1 identity failure, 2 parse or usage error,
//! 3 dimension mismatch, 4 rank-deficient normal equations.

mod deadreckon;
mod register;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "sek3", version, about = "Extended-pose group demos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a velocity log (JSON lines) into a trajectory CSV.
    Deadreckon {
        /// Velocity log; one record per line:
        /// {"t":…, "omega":[…], "nu":[[…],…], "frame":"left"|"right"}
        input: PathBuf,
        /// Number of translation slots.
        #[arg(long)]
        k: usize,
        /// Output sampling step in seconds.
        #[arg(long)]
        dt: f64,
        /// Trajectory CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recover a transformation from point observations by Gauss-Newton.
    Register {
        /// Model points; one per line: {"slot":…, "p":[…]} (slots are 1-based).
        points: PathBuf,
        /// Observations; one per line: {"point":…, "y":[…], "weight":…}
        /// ("point" is the zero-based line index into the points file).
        observations: PathBuf,
        /// Number of translation slots.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run the identity suite and print one line per check.
    Verify {
        /// Number of translation slots.
        #[arg(long)]
        k: usize,
        /// Random trials per identity.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Failure modes with their process exit codes.
pub enum CommandError {
    /// Malformed input; carries a line number when one applies.
    Parse(String),
    Dimension(String),
    RankDeficient(String),
    Io(String),
}

impl CommandError {
    fn exit_code(&self) -> u8 {
        match self {
            CommandError::Parse(_) | CommandError::Io(_) => 2,
            CommandError::Dimension(_) => 3,
            CommandError::RankDeficient(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CommandError::Parse(m)
            | CommandError::Dimension(m)
            | CommandError::RankDeficient(m)
            | CommandError::Io(m) => m,
        }
    }
}

fn run_verify(k: usize, trials: usize, seed: u64) -> ExitCode {
    if trials == 0 {
        eprintln!("error: --trials must be at least 1");
        return ExitCode::from(2);
    }
    let reports = sek3::run_identity_suite(k, trials, seed);
    let mut all_passed = true;
    for report in &reports {
        let status = if report.passed() { "PASS" } else { "FAIL" };
        all_passed &= report.passed();
        println!(
            "{:<42} max residual {:>12.5e}  tolerance {:>8.1e}  {status}",
            report.name, report.max_residual, report.tolerance
        );
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Deadreckon {
            input,
            k,
            dt,
            output,
        } => deadreckon::run(&input, k, dt, output.as_deref()),
        Command::Register {
            points,
            observations,
            k,
            max_iters,
            tol,
        } => register::run(&points, &observations, k, max_iters, tol),
        Command::Verify { k, trials, seed } => return run_verify(k, trials, seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
