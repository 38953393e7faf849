//! Problem files.
//!
//! ```json
//! {
//!   "shape": [6, 5],
//!   "sigma": [3.3108, 1.2723, 0.9786, 0.5334, 0.2780],
//!   "constraint": { "entries": [[1, 2, 1.0], [1, 3, 0.0]] },
//!   "solver": { "epsilon": 1e-14, "max_iters": 100000, "max_restarts": 5, "seed": 7 },
//!   "initial": "start.csv"
//! }
//! ```
//!
//! `constraint` is one of `{"diagonal": [..]}`, `{"entries": [[i, j, v], ..]}`
//! with 1-based indices, or `{"symmetric_diagonal": [..]}`. `initial` is a
//! matrix CSV path, relative to the problem file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use nisvp_core::{ConstraintSetSpec, DenseMatrix, EntryConstraint, RngSeed, SingularSpectrum, SolverConfig};

use crate::matrix_csv;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub shape: [usize; 2],
    pub sigma: Vec<f64>,
    pub constraint: ConstraintFile,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub initial: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintFile {
    Diagonal(Vec<f64>),
    Entries(Vec<(usize, usize, f64)>),
    SymmetricDiagonal(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub epsilon: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_restarts: Option<usize>,
    pub stagnation_window: Option<usize>,
    pub seed: Option<u64>,
}

/// A parsed problem plus where it came from.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub file: ProblemFile,
    pub dir: PathBuf,
}

pub fn load(path: &Path) -> Result<LoadedProblem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = parse(&text).map_err(|e| format!("{}:{e}", path.display()))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedProblem { file, dir })
}

/// Parses problem JSON; errors carry `line:column: message`.
pub fn parse(text: &str) -> Result<ProblemFile, String> {
    serde_json::from_str(text).map_err(|e| format!("{}:{}: {e}", e.line(), e.column()))
}

impl ProblemFile {
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    pub fn cols(&self) -> usize {
        self.shape[1]
    }

    /// Target spectrum sorted descending; the flag reports reordering.
    pub fn spectrum(&self) -> Result<(SingularSpectrum, bool), String> {
        if self.sigma.len() != self.cols() {
            return Err(format!(
                "sigma has {} values but the matrix has {} columns",
                self.sigma.len(),
                self.cols()
            ));
        }
        SingularSpectrum::sorted(self.sigma.clone())
            .map_err(|_| "singular values must be finite and nonnegative".to_string())
    }

    /// The prescribed diagonal, if the constraint fixes exactly the diagonal.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        match &self.constraint {
            ConstraintFile::Diagonal(d) | ConstraintFile::SymmetricDiagonal(d) => Some(d.clone()),
            ConstraintFile::Entries(triples) => {
                let n = self.cols();
                let mut d = vec![None; n];
                for &(i, j, v) in triples {
                    if i != j || i == 0 || i > n || d[i - 1].is_some() {
                        return None;
                    }
                    d[i - 1] = Some(v);
                }
                d.into_iter().collect()
            }
        }
    }

    pub fn symmetric(&self) -> bool {
        matches!(self.constraint, ConstraintFile::SymmetricDiagonal(_))
    }

    /// Validated solver problem (nonnegative solutions required).
    pub fn constraint_spec(&self, spectrum: SingularSpectrum) -> Result<ConstraintSetSpec, String> {
        let (m, n) = (self.rows(), self.cols());
        if m == 0 || n == 0 {
            return Err(format!("shape must be positive, got [{m}, {n}]"));
        }
        if m < n {
            return Err(format!("shape [{m}, {n}] has fewer rows than columns"));
        }
        let entries = match &self.constraint {
            ConstraintFile::Diagonal(d) | ConstraintFile::SymmetricDiagonal(d) => {
                if d.len() != n {
                    return Err(format!("diagonal has {} values, expected {n}", d.len()));
                }
                if let Some((i, v)) = d.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
                    return Err(format!(
                        "diagonal entry {} is {v}; prescribed diagonal entries must be nonnegative",
                        i + 1
                    ));
                }
                EntryConstraint::diagonal(d).map_err(|e| e.to_string())?
            }
            ConstraintFile::Entries(triples) => {
                let mut zero_based = Vec::with_capacity(triples.len());
                for &(i, j, v) in triples {
                    if i == 0 || j == 0 || i > m || j > n {
                        return Err(format!("entry ({i}, {j}) is outside the 1-based {m}x{n} shape"));
                    }
                    if !v.is_finite() || v < 0.0 {
                        return Err(format!(
                            "entry ({i}, {j}) is {v}; prescribed entries must be nonnegative"
                        ));
                    }
                    zero_based.push((i - 1, j - 1, v));
                }
                EntryConstraint::from_triples(&zero_based).map_err(|e| e.to_string())?
            }
        };
        ConstraintSetSpec::new(m, n, spectrum, Some(entries), true, self.symmetric()).map_err(|e| e.to_string())
    }

    /// Solver settings. Precedence for the seed: flag, then environment,
    /// then file, then 0.
    pub fn solver_config(&self, flag_seed: Option<u64>, env_seed: Option<u64>) -> Result<SolverConfig, String> {
        let defaults = SolverConfig::default();
        let o = &self.solver;
        let config = SolverConfig {
            epsilon: o.epsilon.unwrap_or(defaults.epsilon),
            max_iters: o.max_iters.unwrap_or(defaults.max_iters),
            max_restarts: o.max_restarts.unwrap_or(defaults.max_restarts),
            stagnation_window: o.stagnation_window.unwrap_or(defaults.stagnation_window),
            record_trace: false,
            seed: RngSeed(flag_seed.or(env_seed).or(o.seed).unwrap_or(0)),
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn initial_matrix(&self, dir: &Path) -> Result<Option<DenseMatrix>, String> {
        let Some(rel) = &self.initial else {
            return Ok(None);
        };
        let path = dir.join(rel);
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let a = matrix_csv::from_csv(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if a.shape() != (self.rows(), self.cols()) {
            return Err(format!(
                "{}: initial matrix is {}x{}, expected {}x{}",
                path.display(),
                a.rows(),
                a.cols(),
                self.rows(),
                self.cols()
            ));
        }
        Ok(Some(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_constraint_kind() {
        let p = parse(r#"{"shape":[2,2],"sigma":[3,1],"constraint":{"diagonal":[1,1]}}"#).unwrap();
        assert_eq!(p.diagonal(), Some(vec![1.0, 1.0]));
        assert!(!p.symmetric());

        let p = parse(r#"{"shape":[2,2],"sigma":[3,1],"constraint":{"symmetric_diagonal":[1,1]}}"#).unwrap();
        assert!(p.symmetric());

        let p = parse(r#"{"shape":[3,2],"sigma":[3,1],"constraint":{"entries":[[1,2,0.5],[3,1,0]]}}"#).unwrap();
        assert_eq!(p.diagonal(), None);
        let spec = p.constraint_spec(p.spectrum().unwrap().0).unwrap();
        assert_eq!(spec.entries().unwrap().positions(), &[(0, 1), (2, 0)]);
    }

    #[test]
    fn parse_errors_report_position() {
        let err = parse("{\n  \"shape\": [2, 2],\n  \"sigma\": [3, 1,\n}").unwrap_err();
        assert!(err.starts_with("4:"), "{err}");
        let err = parse(r#"{"shape":[2,2],"sigma":[3,1],"constraint":{"diagonal":[1,1]},"extra":1}"#).unwrap_err();
        assert!(err.contains("extra"), "{err}");
    }

    #[test]
    fn validation_messages() {
        let p = parse(r#"{"shape":[2,2],"sigma":[3,1],"constraint":{"diagonal":[-1,1]}}"#).unwrap();
        let err = p.constraint_spec(p.spectrum().unwrap().0).unwrap_err();
        assert!(err.contains("nonnegative"), "{err}");

        let p = parse(r#"{"shape":[2,2],"sigma":[3,1],"constraint":{"entries":[[0,1,1]]}}"#).unwrap();
        assert!(p.constraint_spec(p.spectrum().unwrap().0).is_err());

        let p = parse(r#"{"shape":[2,2],"sigma":[3],"constraint":{"diagonal":[1,1]}}"#).unwrap();
        assert!(p.spectrum().is_err());

        let p = parse(r#"{"shape":[2,3],"sigma":[3,1,1],"constraint":{"diagonal":[1,1,1]}}"#).unwrap();
        assert!(p.constraint_spec(p.spectrum().unwrap().0).is_err());
    }

    #[test]
    fn unsorted_sigma_is_flagged() {
        let p = parse(r#"{"shape":[2,2],"sigma":[1,3],"constraint":{"diagonal":[1,1]}}"#).unwrap();
        let (s, reordered) = p.spectrum().unwrap();
        assert_eq!(s.values(), &[3.0, 1.0]);
        assert!(reordered);
    }

    #[test]
    fn seed_precedence() {
        let p = parse(r#"{"shape":[1,1],"sigma":[1],"constraint":{"diagonal":[1]},"solver":{"seed":3}}"#).unwrap();
        assert_eq!(p.solver_config(None, None).unwrap().seed, RngSeed(3));
        assert_eq!(p.solver_config(None, Some(5)).unwrap().seed, RngSeed(5));
        assert_eq!(p.solver_config(Some(9), Some(5)).unwrap().seed, RngSeed(9));
    }
}
