//! Successive projections between the fixed-spectrum set and the convex
//! constraint set, with stagnation restarts.
//!
//! One iteration, starting from the current constraint-feasible matrix:
//!
//! 1. SVD `A = U diag(delta) V^T`
//! 2. `X = U diag(sigma) V^T` (nearest fixed-spectrum matrix)
//! 3. `Y = P_C(X)`: symmetrize if requested, clamp negatives, overwrite the
//!    prescribed entries
//! 4. stop when `||X - Y||_F / ||X||_F < epsilon`
//!
//! The distances `||X_i - Y_i||` are nonincreasing within a segment. They may
//! settle at a positive value, so a segment whose relative change has not
//! improved for `stagnation_window` iterations is abandoned and the iteration
//! restarts from a fresh random matrix.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::projections::{project_constraints, project_membership_residuals, ConstraintSetSpec, MembershipResiduals};
use crate::rng::{MatrixRng, RngSeed};
use crate::svd::{compute_svd, compute_svd_with_hint, SvdFactors};

/// Range of the random starting matrices.
pub const INITIAL_RANGE: (f64, f64) = (0.0, 10.0);

/// A segment counts as improving when the relative change drops below this
/// fraction of the best value seen so far.
pub const STAGNATION_FACTOR: f64 = 0.999;

/// Absolute slack of the monotone-distance check.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative-change threshold.
    pub epsilon: f64,
    /// Iteration budget per restart segment.
    pub max_iters: usize,
    pub max_restarts: usize,
    pub stagnation_window: usize,
    /// Keep the per-iteration distances of the last segment.
    pub record_trace: bool,
    pub seed: RngSeed,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-14,
            max_iters: 100_000,
            max_restarts: 5,
            stagnation_window: 500,
            record_trace: false,
            seed: RngSeed(0),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.stagnation_window == 0 {
            return Err(Error::InvalidConfig("stagnation_window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Stagnated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Iterations over all segments.
    pub iterations: usize,
    pub restarts_used: usize,
    /// Last constraint-feasible iterate.
    pub final_matrix: DenseMatrix,
    pub residuals: MembershipResiduals,
    /// Relative change at the last iteration.
    pub final_change: f64,
    /// `||X_i - Y_i||_F` per iteration of the last segment.
    pub distance_trace: Option<Vec<f64>>,
    /// Seconds.
    pub wall_time: f64,
}

struct Segment {
    status: SolveStatus,
    iterations: usize,
    matrix: DenseMatrix,
    change: f64,
    trace: Vec<f64>,
}

/// Runs the projection iteration. Without `initial`, the start is uniform
/// on [`INITIAL_RANGE`] drawn from `config.seed`; restarts draw from the same
/// stream.
pub fn solve(spec: &ConstraintSetSpec, config: &SolverConfig, initial: Option<&DenseMatrix>) -> Result<SolveReport> {
    config.validate()?;
    let clock = Instant::now();
    let (m, n) = spec.shape();
    let (lo, hi) = INITIAL_RANGE;
    let mut rng = MatrixRng::new(config.seed);

    let mut start = match initial {
        Some(a) if a.shape() != (m, n) => {
            return Err(Error::ShapeMismatch {
                expected: (m, n),
                got: a.shape(),
            })
        }
        Some(a) => a.clone(),
        None => rng.uniform_matrix(m, n, lo, hi)?,
    };

    let mut iterations = 0;
    let mut restarts_used = 0;
    loop {
        let seg = run_segment(spec, config, &start, &mut rng)?;
        iterations += seg.iterations;
        if seg.status == SolveStatus::Converged || restarts_used >= config.max_restarts {
            let residuals = project_membership_residuals(&seg.matrix, spec)?;
            return Ok(SolveReport {
                status: seg.status,
                iterations,
                restarts_used,
                final_matrix: seg.matrix,
                residuals,
                final_change: seg.change,
                distance_trace: config.record_trace.then_some(seg.trace),
                wall_time: clock.elapsed().as_secs_f64(),
            });
        }
        restarts_used += 1;
        start = rng.uniform_matrix(m, n, lo, hi)?;
    }
}

fn run_segment(
    spec: &ConstraintSetSpec,
    config: &SolverConfig,
    start: &DenseMatrix,
    rng: &mut MatrixRng,
) -> Result<Segment> {
    let sigma = spec.spectrum().values();
    let mut current = project_constraints(start, spec)?;
    let mut hint: Option<DenseMatrix> = None;
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut change = f64::INFINITY;

    for it in 1..=config.max_iters {
        let factors = svd_step(&current, hint.as_ref(), rng)?;
        let on_manifold = factors.compose(sigma)?;
        let projected = project_constraints(&on_manifold, spec)?;
        let dist = on_manifold.distance(&projected)?;
        let norm = on_manifold.frobenius_norm();
        change = if norm > 0.0 {
            dist / norm
        } else if dist == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if config.record_trace {
            trace.push(dist);
        }
        hint = Some(factors.v);
        current = projected;

        if change < config.epsilon {
            return Ok(Segment {
                status: SolveStatus::Converged,
                iterations: it,
                matrix: current,
                change,
                trace,
            });
        }
        if change < best * STAGNATION_FACTOR {
            best = change;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.stagnation_window {
                return Ok(Segment {
                    status: SolveStatus::Stagnated,
                    iterations: it,
                    matrix: current,
                    change,
                    trace,
                });
            }
        }
    }
    Ok(Segment {
        status: SolveStatus::MaxIters,
        iterations: config.max_iters,
        matrix: current,
        change,
        trace,
    })
}

/// SVD with one retry on a slightly perturbed copy.
fn svd_step(a: &DenseMatrix, hint: Option<&DenseMatrix>, rng: &mut MatrixRng) -> Result<SvdFactors> {
    let first = match hint {
        Some(v) => compute_svd_with_hint(a, v),
        None => compute_svd(a),
    };
    match first {
        Err(Error::NoConvergence { .. }) => {
            let scale = 1e-12 * a.frobenius_norm().max(1.0);
            let noise = rng.uniform_matrix(a.rows(), a.cols(), 0.0, 1.0)?;
            compute_svd(&a.add(&noise.scale(scale))?)
        }
        other => other,
    }
}

/// Result of the monotone-distance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonotoneCheck {
    pub monotone: bool,
    /// Index `i` with `trace[i] > trace[i - 1] + slack`.
    pub first_violation: Option<usize>,
}

/// First index where `trace` increases by more than `slack`.
pub fn first_increase(trace: &[f64], slack: f64) -> Option<usize> {
    trace.windows(2).position(|w| w[1] > w[0] + slack).map(|i| i + 1)
}

/// Checks that the recorded distances never increase (beyond
/// [`MONOTONE_SLACK`]).
pub fn distance_trace_is_monotone(report: &SolveReport) -> Result<MonotoneCheck> {
    let trace = report.distance_trace.as_ref().ok_or(Error::NoTrace)?;
    let first_violation = first_increase(trace, MONOTONE_SLACK);
    Ok(MonotoneCheck {
        monotone: first_violation.is_none(),
        first_violation,
    })
}
