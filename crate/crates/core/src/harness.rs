//! Randomised benchmark over matrix sizes, plus a brute-force 2x2 search
//! used to cross-check the closed-form constructor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::SingularSpectrum;
use crate::projections::ConstraintSetSpec;
use crate::rng::{MatrixRng, RngSeed};
use crate::solver::{solve, SolveStatus, SolverConfig};
use crate::svd::singular_values_only;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Sampling range for target matrices and starting points.
    pub range: (f64, f64),
    pub solver: SolverConfig,
    pub seed: RngSeed,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            sizes: vec![5, 10, 20, 100],
            trials: 100,
            range: (0.0, 10.0),
            solver: SolverConfig::default(),
            seed: RngSeed(42),
        }
    }
}

/// Outcome of one random instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub status: SolveStatus,
    pub iterations: usize,
    pub restarts: usize,
    pub wall_time: f64,
}

/// Aggregate statistics for one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n: usize,
    pub minit: usize,
    pub maxit: usize,
    pub aveit: f64,
    pub mint: f64,
    pub maxt: f64,
    pub avet: f64,
    pub success_rate_percent: f64,
}

pub const CSV_HEADER: &str = "n,minit,maxit,aveit,mint,maxt,avet,success_rate";

impl BenchmarkRow {
    /// One CSV line; timings are left empty unless requested.
    pub fn to_csv(&self, with_timings: bool) -> String {
        let times = if with_timings {
            format!("{:.6},{:.6},{:.6}", self.mint, self.maxt, self.avet)
        } else {
            ",,".to_string()
        };
        format!(
            "{},{},{},{:.2},{},{:.1}",
            self.n, self.minit, self.maxit, self.aveit, times, self.success_rate_percent
        )
    }
}

fn validate(spec: &BenchmarkSpec) -> Result<()> {
    if spec.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if spec.sizes.is_empty() || spec.sizes.contains(&0) {
        return Err(Error::InvalidConfig("sizes must be positive".into()));
    }
    let (lo, hi) = spec.range;
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::BadRange { lo, hi });
    }
    spec.solver.validate()
}

/// One trial: sample a nonnegative `n x n` matrix, take its singular values
/// and diagonal as the target (so a solution exists), and solve from an
/// independent random start.
pub fn run_trial(spec: &BenchmarkSpec, n: usize, trial: usize) -> Result<TrialRecord> {
    let (lo, hi) = spec.range;
    let mut rng = MatrixRng::new(spec.seed.derive(&[n as u64, trial as u64]));
    let target = rng.uniform_matrix(n, n, lo, hi)?;
    let initial = rng.uniform_matrix(n, n, lo, hi)?;
    let solver = SolverConfig {
        seed: rng.next_seed(),
        record_trace: false,
        ..spec.solver.clone()
    };

    let sigma = SingularSpectrum::new(singular_values_only(&target)?)?;
    let problem = ConstraintSetSpec::with_diagonal(n, n, sigma, &target.diagonal())?;
    let report = solve(&problem, &solver, Some(&initial))?;
    Ok(TrialRecord {
        n,
        trial,
        status: report.status,
        iterations: report.iterations,
        restarts: report.restarts_used,
        wall_time: report.wall_time,
    })
}

/// Every trial of every size, in (size, trial) order. Trials run in
/// parallel; each draws from its own derived seed.
pub fn run_trials(spec: &BenchmarkSpec) -> Result<Vec<TrialRecord>> {
    validate(spec)?;
    let jobs: Vec<(usize, usize)> = spec
        .sizes
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    jobs.par_iter().map(|&(n, t)| run_trial(spec, n, t)).collect()
}

/// Statistics over the records of one size. Iteration and timing figures
/// cover all trials, failed ones included.
pub fn aggregate(n: usize, records: &[TrialRecord]) -> Option<BenchmarkRow> {
    let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
    if rows.is_empty() {
        return None;
    }
    let count = rows.len() as f64;
    let its = rows.iter().map(|r| r.iterations);
    let times = rows.iter().map(|r| r.wall_time);
    let successes = rows.iter().filter(|r| r.status == SolveStatus::Converged).count();
    Some(BenchmarkRow {
        n,
        minit: its.clone().min().unwrap_or(0),
        maxit: its.clone().max().unwrap_or(0),
        aveit: its.map(|i| i as f64).sum::<f64>() / count,
        mint: times.clone().fold(f64::INFINITY, f64::min),
        maxt: times.clone().fold(0.0, f64::max),
        avet: times.sum::<f64>() / count,
        success_rate_percent: 100.0 * successes as f64 / count,
    })
}

/// Runs the benchmark and returns one row per size, in the order given.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<Vec<BenchmarkRow>> {
    let records = run_trials(spec)?;
    let mut seen = Vec::new();
    Ok(spec
        .sizes
        .iter()
        .filter(|n| {
            let fresh = !seen.contains(*n);
            seen.push(**n);
            fresh
        })
        .filter_map(|&n| aggregate(n, &records))
        .collect())
}

/// Best off-diagonal pair found by [`oracle_2x2_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub b: f64,
    pub c: f64,
    /// `||sorted sigma([[d1, b], [c, d2]]) - sigma||_2`.
    pub residual: f64,
}

/// Singular values of `[[a, b], [c, d]]`, descending.
fn singular_values_2x2(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let p = ((a + d).powi(2) + (c - b).powi(2)).sqrt();
    let q = ((a - d).powi(2) + (b + c).powi(2)).sqrt();
    (0.5 * (p + q), 0.5 * (p - q).abs())
}

/// Exhaustive grid search over `b, c in [0, sigma1 + sigma2]` for the 2x2
/// matrix `[[d1, b], [c, d2]]` closest in singular values to `sigma`.
pub fn oracle_2x2_search(sigma: [f64; 2], d: [f64; 2], grid_step: f64) -> Result<OracleResult> {
    if !grid_step.is_finite() || grid_step <= 0.0 {
        return Err(Error::InvalidConfig("grid_step must be positive".into()));
    }
    let upper = sigma[0] + sigma[1];
    let steps = (upper / grid_step).floor() as usize;
    let mut best = OracleResult {
        b: 0.0,
        c: 0.0,
        residual: f64::INFINITY,
    };
    for i in 0..=steps {
        let b = i as f64 * grid_step;
        for j in 0..=steps {
            let c = j as f64 * grid_step;
            let (s1, s2) = singular_values_2x2(d[0], b, c, d[1]);
            let residual = ((s1 - sigma[0]).powi(2) + (s2 - sigma[1]).powi(2)).sqrt();
            if residual < best.residual {
                best = OracleResult { b, c, residual };
            }
        }
    }
    Ok(best)
}
