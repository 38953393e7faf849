//! `nisvp`: build nonnegative matrices with prescribed singular values and
//! prescribed entries.
//!
//! Exit codes: 0 success or feasible, 1 usage or input error, 2 solver budget
//! exhausted, 3 infeasible.

mod matrix_csv;
mod problem;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use nisvp_core::harness::CSV_HEADER;
use nisvp_core::{
    nn2x2_construct, nn2x2_feasible, run_benchmark, sing_thompson_feasible, solve, BenchmarkSpec, MembershipResiduals,
    RngSeed, SingularSpectrum, SolveStatus, SolverConfig, TwoByTwoCase, Violation,
};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

const SEED_ENV: &str = "NISVP_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "nisvp",
    version,
    about = "Nonnegative matrices with prescribed singular values and entries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the projection solver on a problem file.
    Solve {
        file: PathBuf,
        /// Solution matrix CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report (stderr if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Include wall time in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Existence tests for the problem's prescribed diagonal.
    Check { file: PathBuf },
    /// Closed-form nonnegative 2x2 construction.
    Construct2x2 {
        #[arg(long, num_args = 2, value_names = ["S1", "S2"], allow_negative_numbers = true, required = true)]
        sigma: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["D1", "D2"], allow_negative_numbers = true, required = true)]
        diag: Vec<f64>,
    },
    /// Random benchmark over matrix sizes, written as CSV.
    Bench {
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        max_restarts: Option<usize>,
        /// Fill the timing columns.
        #[arg(long)]
        timings: bool,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let outcome = env_seed().and_then(|env_seed| match cli.command {
        Command::Solve {
            file,
            out,
            report,
            seed,
            timings,
        } => cmd_solve(&file, out.as_deref(), report.as_deref(), seed.or(env_seed), timings),
        Command::Check { file } => cmd_check(&file),
        Command::Construct2x2 { sigma, diag } => cmd_construct2x2(&sigma, &diag),
        Command::Bench {
            sizes,
            trials,
            seed,
            out,
            epsilon,
            max_iters,
            max_restarts,
            timings,
        } => {
            let mut spec = BenchmarkSpec::default();
            if let Some(sizes) = sizes {
                spec.sizes = sizes;
            }
            if let Some(trials) = trials {
                spec.trials = trials;
            }
            if let Some(seed) = seed.or(env_seed) {
                spec.seed = RngSeed(seed);
            }
            if let Some(epsilon) = epsilon {
                spec.solver.epsilon = epsilon;
            }
            if let Some(max_iters) = max_iters {
                spec.solver.max_iters = max_iters;
            }
            if let Some(max_restarts) = max_restarts {
                spec.solver.max_restarts = max_restarts;
            }
            cmd_bench(&spec, out.as_deref(), timings)
        }
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        _ => Ok(None),
    }
}

fn write_output(path: Option<&Path>, text: &str, fallback_stderr: bool) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None if fallback_stderr => {
            let _ = std::io::stderr().write_all(text.as_bytes());
            Ok(())
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn load_spectrum(file: &problem::ProblemFile) -> Result<SingularSpectrum, Failure> {
    let (spectrum, reordered) = file.spectrum().map_err(Failure::input)?;
    if reordered {
        eprintln!("warning: sigma was not in descending order and has been sorted");
    }
    Ok(spectrum)
}

#[derive(Serialize)]
struct SolveJson {
    status: SolveStatus,
    iterations: usize,
    restarts_used: usize,
    final_relative_change: f64,
    residuals: MembershipResiduals,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_seconds: Option<f64>,
}

fn cmd_solve(
    path: &Path,
    out: Option<&Path>,
    report_path: Option<&Path>,
    seed: Option<u64>,
    timings: bool,
) -> CmdResult {
    let loaded = problem::load(path).map_err(Failure::input)?;
    let file = &loaded.file;
    let spectrum = load_spectrum(file)?;
    let spec = file.constraint_spec(spectrum).map_err(Failure::input)?;
    let config: SolverConfig = file.solver_config(seed, None).map_err(Failure::input)?;
    let initial = file.initial_matrix(&loaded.dir).map_err(Failure::input)?;

    let report = solve(&spec, &config, initial.as_ref()).map_err(|e| Failure::input(e.to_string()))?;
    let json = SolveJson {
        status: report.status,
        iterations: report.iterations,
        restarts_used: report.restarts_used,
        final_relative_change: report.final_change,
        residuals: report.residuals,
        seed: config.seed.0,
        wall_time_seconds: timings.then_some(report.wall_time),
    };
    let mut report_text = serde_json::to_string_pretty(&json).map_err(|e| Failure::input(e.to_string()))?;
    report_text.push('\n');

    write_output(out, &matrix_csv::to_csv(&report.final_matrix), false)?;
    write_output(report_path, &report_text, true)?;
    Ok(match report.status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIters | SolveStatus::Stagnated => EXIT_BUDGET,
    })
}

fn describe_violation(v: &Violation) -> String {
    match v {
        Violation::PartialSum { k } => format!("partial sum k={k}"),
        Violation::Alternating => "alternating sum".to_string(),
    }
}

fn cmd_check(path: &Path) -> CmdResult {
    let loaded = problem::load(path).map_err(Failure::input)?;
    let file = &loaded.file;
    let spectrum = load_spectrum(file)?;
    // Validates shape, bounds and nonnegativity.
    file.constraint_spec(spectrum.clone()).map_err(Failure::input)?;
    let d = file
        .diagonal()
        .ok_or_else(|| Failure::input("check needs a constraint that fixes exactly the diagonal"))?;

    let verdict = sing_thompson_feasible(&spectrum, &d).map_err(|e| Failure::input(e.to_string()))?;
    let mut line = if verdict.feasible {
        "real: feasible".to_string()
    } else {
        let list: Vec<String> = verdict.violations.iter().map(describe_violation).collect();
        format!("real: infeasible (violated: {})", list.join(", "))
    };
    let mut feasible = verdict.feasible;
    if file.rows() == 2 && file.cols() == 2 {
        let case = nn2x2_feasible(&spectrum, &d).map_err(|e| Failure::input(e.to_string()))?;
        let text = match case {
            TwoByTwoCase::FeasibleCase1 => "feasible (case 1, det >= 0)",
            TwoByTwoCase::FeasibleCase2 => "feasible (case 2, det < 0)",
            TwoByTwoCase::Infeasible => "infeasible",
        };
        line.push_str(&format!("; nonnegative(2×2): {text}"));
        feasible &= case.is_feasible();
    }
    println!("{line}");
    Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_construct2x2(sigma: &[f64], diag: &[f64]) -> CmdResult {
    if let Some(x) = sigma.iter().chain(diag).find(|x| !x.is_finite()) {
        return Err(Failure::input(format!("{x} is not a finite number")));
    }
    if let Some(x) = diag.iter().find(|x| **x < 0.0) {
        return Err(Failure::input(format!(
            "diagonal entry {x} is negative; prescribed diagonal entries must be nonnegative"
        )));
    }
    let (spectrum, reordered) = SingularSpectrum::sorted(sigma.to_vec())
        .map_err(|_| Failure::input("singular values must be finite and nonnegative"))?;
    if reordered {
        eprintln!("warning: sigma was not in descending order and has been sorted");
    }
    if nn2x2_feasible(&spectrum, diag).map_err(|e| Failure::input(e.to_string()))? == TwoByTwoCase::Infeasible {
        println!("nonnegative(2×2): infeasible");
        return Ok(EXIT_INFEASIBLE);
    }
    let solution = nn2x2_construct(&spectrum, diag).map_err(|e| Failure::input(e.to_string()))?;
    print!("{}", matrix_csv::to_csv(&solution.matrix()));
    Ok(EXIT_OK)
}

fn cmd_bench(spec: &BenchmarkSpec, out: Option<&Path>, timings: bool) -> CmdResult {
    let rows = run_benchmark(spec).map_err(|e| Failure::input(e.to_string()))?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.to_csv(timings));
        text.push('\n');
    }
    write_output(out, &text, false)?;
    Ok(EXIT_OK)
}
