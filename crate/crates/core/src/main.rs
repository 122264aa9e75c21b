use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bimetric::scenario::{
    convergence_study, load_scenario, run_all_checks, threads_from_env, CheckReport, RunError, Scenario,
};

/// Residual checks for bimetric vierbein scenarios with Dirac matter.
#[derive(Debug, Parser)]
#[command(name = "bimetric", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check over the sample points.
    Check {
        scenario: PathBuf,
        /// Write the JSON report to a file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
        /// Override a tolerance, e.g. `--tol commutator=1e-6`.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random points, or points per axis in grid mode.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Fit the convergence order of the finite-difference checks.
    Converge {
        scenario: PathBuf,
        /// Strictly decreasing steps, e.g. `1e-3,5e-4,2.5e-4`.
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Human-readable summary of all checks.
    Report { scenario: PathBuf },
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn load(path: &PathBuf) -> Result<Scenario, ExitCode> {
    load_scenario(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INPUT)
    })
}

fn run(s: &Scenario) -> Result<CheckReport, ExitCode> {
    run_all_checks(s).map(CheckReport::stamped).map_err(|e: RunError| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INPUT)
    })
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = threads_from_env() {
        // the runner also honors this per call; a global pool keeps other rayon users in line
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(code) | Err(code) => code,
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, ExitCode> {
    match cmd {
        Command::Check { scenario, out, json, tolerances, seed, points } => {
            let mut s = load(&scenario)?;
            for t in &tolerances {
                let (name, value) = t.split_once('=').ok_or_else(|| {
                    eprintln!("error: --tol expects NAME=VALUE, got `{t}`");
                    ExitCode::from(EXIT_INPUT)
                })?;
                let value: f64 = value.trim().parse().map_err(|_| {
                    eprintln!("error: --tol {name}: `{value}` is not a number");
                    ExitCode::from(EXIT_INPUT)
                })?;
                s.set_tolerance(name.trim(), value).map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_INPUT)
                })?;
            }
            if let Some(seed) = seed {
                s.sampling.seed = seed;
            }
            if let Some(n) = points {
                if n == 0 {
                    eprintln!("error: --points must be at least 1");
                    return Err(ExitCode::from(EXIT_INPUT));
                }
                s.sampling.count = n;
            }
            let report = run(&s)?;
            if let Some(path) = out {
                std::fs::write(&path, report.to_json() + "\n").map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(EXIT_INPUT)
                })?;
            }
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.summary());
            }
            Ok(verdict(report.passed))
        }
        Command::Converge { scenario, steps, json } => {
            let s = load(&scenario)?;
            let table = convergence_study(&s, &steps).map_err(|e| {
                eprintln!("error: {}", e.error);
                ExitCode::from(EXIT_INPUT)
            })?;
            if json {
                println!("{}", table.to_json());
            } else {
                print!("{}", table.summary());
            }
            Ok(verdict(table.passed()))
        }
        Command::Report { scenario } => {
            let s = load(&scenario)?;
            let report = run(&s)?;
            print!("{}", report.summary());
            Ok(verdict(report.passed))
        }
    }
}
