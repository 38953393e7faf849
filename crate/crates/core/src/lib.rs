//! Construction of nonnegative matrices with prescribed singular values and
//! prescribed entries.
//!
//! The general solver alternates between the set of matrices with the target
//! singular values and the convex set of nonnegative matrices carrying the
//! prescribed entries. Small cases are covered exactly: the Sing–Thompson
//! conditions decide existence of a real matrix with given singular values
//! and diagonal, and 2x2 nonnegative instances are decided and built in
//! closed form.
//!
//! ```
//! use nisvp_core::{solve, ConstraintSetSpec, SingularSpectrum, SolveStatus, SolverConfig};
//!
//! let sigma = SingularSpectrum::new(vec![5.0, 1.0]).unwrap();
//! let spec = ConstraintSetSpec::with_diagonal(2, 2, sigma, &[2.0, 1.0]).unwrap();
//! let report = solve(&spec, &SolverConfig::default(), None).unwrap();
//! assert_eq!(report.status, SolveStatus::Converged);
//! ```

pub mod error;
pub mod feasibility;
pub mod harness;
pub mod matrix;
pub mod projections;
pub mod rng;
pub mod solver;
pub mod svd;

pub use error::{Error, Result};
pub use feasibility::{
    manifold_dimension, nn2x2_construct, nn2x2_construct_case, nn2x2_feasible, sing_thompson_feasible, DeterminantSign,
    SingThompsonVerdict, SingularSpectrum, TwoByTwoCase, TwoByTwoSolution, Violation,
};
pub use harness::{
    aggregate, oracle_2x2_search, run_benchmark, run_trial, run_trials, BenchmarkRow, BenchmarkSpec, OracleResult,
    TrialRecord,
};
pub use matrix::{relative_change, DenseMatrix};
pub use projections::{
    project_constraints, project_entries, project_membership_residuals, project_nonnegative, project_spectrum,
    project_symmetric, ConstraintSetSpec, EntryConstraint, MembershipResiduals,
};
pub use rng::{random_nonnegative, MatrixRng, RngSeed};
pub use solver::{distance_trace_is_monotone, solve, MonotoneCheck, SolveReport, SolveStatus, SolverConfig};
pub use svd::{compute_svd, compute_svd_with_hint, singular_values_only, SvdFactors};
