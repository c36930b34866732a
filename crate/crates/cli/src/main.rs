mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use superopt::candidate::{check_candidate, parse_candidate, DEFAULT_CHECK_TOL};
use superopt::hankel::MAX_TRUNCATION;
use superopt::outer::{DEFAULT_TOL_ANALYTIC, DEFAULT_TOL_ZERO};
use superopt::rational::{builtin_symbol, parse_symbol, SymbolSpec, BUILTIN_NAMES};
use superopt::{run_superopt, Error, SolverConfig};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "superopt", version, about = "Superoptimal analytic approximation of rational matrix functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the superoptimal approximant and write report.json.
    Solve {
        /// Symbol document (JSON).
        input: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        /// Report path; a directory receives `report.json`.
        #[arg(long, default_value = "report.json")]
        output: PathBuf,
        /// Also write the singular values of G − AG on the grid as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Check a candidate analytic Q against the level-0 Schmidt conditions
    /// and the constancy of the singular values of G − Q.
    Check {
        input: PathBuf,
        /// Candidate Q in the symbol schema with analytic Laurent entries.
        candidate: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long, default_value_t = DEFAULT_CHECK_TOL)]
        tol: f64,
        /// Write the check report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print or write a bundled symbol document.
    Example {
        /// One of py2x2, diag, scalar-zbar.
        name: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long, default_value_t = 1024)]
    grid_size: usize,
    #[arg(long, default_value_t = 64)]
    trunc: usize,
    #[arg(long, default_value_t = MAX_TRUNCATION)]
    max_trunc: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol_rank: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_residual: f64,
    #[arg(long, default_value_t = 16)]
    max_q_degree: usize,
    #[arg(long, default_value_t = DEFAULT_TOL_ZERO)]
    tol_zero: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_ANALYTIC)]
    tol_analytic: f64,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            grid_size: self.grid_size,
            trunc: self.trunc,
            max_trunc: self.max_trunc,
            max_q_degree: self.max_q_degree,
            tol_rank: self.tol_rank,
            tol_residual: self.tol_residual,
            tol_zero: self.tol_zero,
            tol_analytic: self.tol_analytic,
        }
    }
}

enum Failure {
    CheckFailed,
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))
}

fn read_symbol(path: &Path) -> Result<(Vec<u8>, SymbolSpec), Failure> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Validation(format!("{} is not UTF-8", path.display())))?;
    Ok((bytes, parse_symbol(&text)?))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))
}

fn solve(input: &Path, config: SolverConfig, output: &Path, profile: Option<&Path>) -> Result<(), Failure> {
    let start = Instant::now();
    let (bytes, spec) = read_symbol(input)?;
    config.validate()?;
    let solve_start = Instant::now();
    let res = run_superopt(&spec, &config)?;
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let timings = json!({
        "solve_seconds": solve_seconds,
        "total_seconds": start.elapsed().as_secs_f64(),
        "timestamp_unix": timestamp,
    });
    let report = report::run_report(&bytes, &res, timings)?;
    let path = if output.is_dir() { output.join("report.json") } else { output.to_path_buf() };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_file(&path, &text)?;
    if let Some(p) = profile {
        write_file(p, &report::profile_csv(&res))?;
    }

    let values: Vec<String> = res.superoptimal_values().iter().map(|t| format!("{t:.10}")).collect();
    println!("r = {}; t = [{}]", res.r, values.join(", "));
    println!("report written to {}", path.display());
    if !res.report.pass {
        return Err(Failure::Numerical(
            "invariant checks failed; see diagnostics in the report".into(),
        ));
    }
    Ok(())
}

fn check(input: &Path, candidate: &Path, config: SolverConfig, tol: f64, output: Option<&Path>) -> Result<(), Failure> {
    let (_, spec) = read_symbol(input)?;
    let text = String::from_utf8(read_input(candidate)?)
        .map_err(|_| Failure::Validation(format!("{} is not UTF-8", candidate.display())))?;
    let q = parse_candidate(&text)?;
    let report = check_candidate(&spec, &q, &config, tol)?;
    let mut text = serde_json::to_string_pretty(&report).expect("check report serializes");
    text.push('\n');
    match output {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .profiles
            .iter()
            .filter(|p| !p.pass)
            .map(|p| format!("s_{}", p.index))
            .collect();
        eprintln!(
            "check failed: level-0 conditions {}; non-constant profiles: [{}]",
            if report.level0_pass { "hold" } else { "violated" },
            failed.join(", ")
        );
        Err(Failure::CheckFailed)
    }
}

fn example(name: &str, output: Option<&Path>) -> Result<(), Failure> {
    let spec = builtin_symbol(name).map_err(|_| {
        Failure::Validation(format!("unknown example {name:?}; expected one of {}", BUILTIN_NAMES.join(", ")))
    })?;
    let mut text = spec.to_json_pretty();
    text.push('\n');
    match output {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve { input, solver, output, profile } => solve(input, solver.config(), output, profile.as_deref()),
        Command::Check { input, candidate, solver, tol, output } => {
            check(input, candidate, solver.config(), *tol, output.as_deref())
        }
        Command::Example { name, output } => example(name, output.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
