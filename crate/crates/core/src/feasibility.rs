//! Existence tests for matrices with prescribed singular values and diagonal.
//!
//! * [`sing_thompson_feasible`]: real matrices of any size.
//! * [`nn2x2_feasible`] / [`nn2x2_construct`]: nonnegative 2x2 matrices,
//!   with a closed-form constructor for the off-diagonal pair.
//! * [`manifold_dimension`]: dimension of the set of `m x n` matrices with
//!   fixed, strictly positive singular values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Relative slack applied to inequalities that are tight up to rounding.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Target singular values, descending and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SingularSpectrum(Vec<f64>);

impl SingularSpectrum {
    /// Accepts values that are already sorted descending.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty()
            || values.iter().any(|x| !x.is_finite() || *x < 0.0)
            || values.windows(2).any(|w| w[0] < w[1])
        {
            return Err(Error::BadSpectrum);
        }
        Ok(Self(values))
    }

    /// Sorts descending first. The flag reports whether the order changed.
    pub fn sorted(mut values: Vec<f64>) -> Result<(Self, bool)> {
        let was_sorted = values.windows(2).all(|w| w[0] >= w[1]);
        values.sort_by(|a, b| b.total_cmp(a));
        Ok((Self::new(values)?, !was_sorted))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.0[0]
    }
}

impl TryFrom<Vec<f64>> for SingularSpectrum {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<SingularSpectrum> for Vec<f64> {
    fn from(s: SingularSpectrum) -> Self {
        s.0
    }
}

/// One violated inequality of the Sing–Thompson test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Partial sum of the `k` largest `|d_i|` exceeds that of the `k`
    /// largest singular values (`k` is 1-based).
    PartialSum { k: usize },
    /// The alternating condition on the last entry.
    Alternating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingThompsonVerdict {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Whether some real `m x n` matrix has singular values `sigma` and main
/// diagonal `d` (in any order). Signed `d` is allowed.
pub fn sing_thompson_feasible(sigma: &SingularSpectrum, d: &[f64]) -> Result<SingThompsonVerdict> {
    let n = sigma.len();
    if d.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: d.len(),
        });
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig("diagonal entries must be finite".into()));
    }
    let mut abs_d: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    abs_d.sort_by(|a, b| b.total_cmp(a));
    let s = sigma.values();
    let slack = BOUNDARY_TOLERANCE * sigma.largest().max(abs_d[0]).max(1.0);

    let mut violations = Vec::new();
    let (mut sum_d, mut sum_s) = (0.0, 0.0);
    for k in 0..n {
        sum_d += abs_d[k];
        sum_s += s[k];
        if sum_d > sum_s + slack * (k + 1) as f64 {
            violations.push(Violation::PartialSum { k: k + 1 });
        }
    }
    let head_d: f64 = abs_d[..n - 1].iter().sum();
    let head_s: f64 = s[..n - 1].iter().sum();
    if head_d - abs_d[n - 1] > head_s - s[n - 1] + slack * n as f64 {
        violations.push(Violation::Alternating);
    }
    Ok(SingThompsonVerdict {
        feasible: violations.is_empty(),
        violations,
    })
}

/// Outcome of the nonnegative 2x2 existence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoByTwoCase {
    /// Realisable with `bc <= d1 d2` (nonnegative determinant).
    FeasibleCase1,
    /// Realisable with `bc > d1 d2` (negative determinant).
    FeasibleCase2,
    Infeasible,
}

impl TwoByTwoCase {
    pub fn is_feasible(self) -> bool {
        self != TwoByTwoCase::Infeasible
    }
}

/// Sign of the determinant of a constructed 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeterminantSign {
    DetNonneg,
    DetNeg,
}

/// Nonnegative `[[d1, b], [c, d2]]` with the requested singular values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoByTwoSolution {
    pub d1: f64,
    pub d2: f64,
    pub b: f64,
    pub c: f64,
    pub case_tag: DeterminantSign,
    /// The caller's diagonal was ascending and was sorted internally.
    pub diagonal_swapped: bool,
}

impl TwoByTwoSolution {
    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_raw(2, 2, vec![self.d1, self.b, self.c, self.d2])
    }
}

struct Sorted2 {
    s1: f64,
    s2: f64,
    d1: f64,
    d2: f64,
    swapped: bool,
}

fn prepare_2x2(sigma: &SingularSpectrum, d: &[f64]) -> Result<Sorted2> {
    if sigma.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: sigma.len(),
        });
    }
    if d.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: d.len(),
        });
    }
    for (index, &value) in d.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeDiagonal { index, value });
        }
    }
    let swapped = d[0] < d[1];
    let (d1, d2) = if swapped { (d[1], d[0]) } else { (d[0], d[1]) };
    let s = sigma.values();
    Ok(Sorted2 {
        s1: s[0],
        s2: s[1],
        d1,
        d2,
        swapped,
    })
}

fn classify(p: &Sorted2) -> TwoByTwoCase {
    let lin = BOUNDARY_TOLERANCE * p.s1.max(p.d1).max(1.0);
    let quad = BOUNDARY_TOLERANCE * (p.s1 * p.s1).max(p.d1 * p.d1).max(1.0);
    let case1 =
        p.s1 * p.s2 <= p.d1 * p.d2 + quad && p.s1 + p.s2 >= p.d1 + p.d2 - lin && p.s1 - p.s2 >= p.d1 - p.d2 - lin;
    let case2 = p.s1 - p.s2 >= p.d1 + p.d2 - lin;
    if case1 {
        TwoByTwoCase::FeasibleCase1
    } else if case2 {
        TwoByTwoCase::FeasibleCase2
    } else {
        TwoByTwoCase::Infeasible
    }
}

/// Existence of a nonnegative 2x2 matrix with singular values `sigma` and
/// diagonal `d` (either order). Case 1 wins when both cases hold.
pub fn nn2x2_feasible(sigma: &SingularSpectrum, d: &[f64]) -> Result<TwoByTwoCase> {
    Ok(classify(&prepare_2x2(sigma, d)?))
}

/// Closed-form nonnegative 2x2 matrix, using the preferred feasible case.
pub fn nn2x2_construct(sigma: &SingularSpectrum, d: &[f64]) -> Result<TwoByTwoSolution> {
    let p = prepare_2x2(sigma, d)?;
    match classify(&p) {
        TwoByTwoCase::Infeasible => Err(Error::InfeasibleInput),
        case => Ok(build(&p, case)),
    }
}

/// Closed-form construction for a specific case, when that case is feasible.
/// Both cases can hold at once and then give two distinct solutions.
pub fn nn2x2_construct_case(sigma: &SingularSpectrum, d: &[f64], case: TwoByTwoCase) -> Result<TwoByTwoSolution> {
    let p = prepare_2x2(sigma, d)?;
    let lin = BOUNDARY_TOLERANCE * p.s1.max(p.d1).max(1.0);
    let ok = match case {
        TwoByTwoCase::Infeasible => false,
        TwoByTwoCase::FeasibleCase1 => classify(&p) == TwoByTwoCase::FeasibleCase1,
        TwoByTwoCase::FeasibleCase2 => p.s1 - p.s2 >= p.d1 + p.d2 - lin,
    };
    if !ok {
        return Err(Error::InfeasibleInput);
    }
    Ok(build(&p, case))
}

fn build(p: &Sorted2, case: TwoByTwoCase) -> TwoByTwoSolution {
    // b^2 + c^2 = sum_sq, bc = product.
    let sum_sq = p.s1 * p.s1 + p.s2 * p.s2 - p.d1 * p.d1 - p.d2 * p.d2;
    let (product, case_tag) = match case {
        TwoByTwoCase::FeasibleCase2 => (p.s1 * p.s2 + p.d1 * p.d2, DeterminantSign::DetNeg),
        _ => ((p.d1 * p.d2 - p.s1 * p.s2).max(0.0), DeterminantSign::DetNonneg),
    };
    let plus = (sum_sq + 2.0 * product).max(0.0).sqrt();
    let minus = (sum_sq - 2.0 * product).max(0.0).sqrt();
    let b = 0.5 * (plus + minus);
    let c = (0.5 * (plus - minus)).max(0.0);
    if p.swapped {
        // Conjugating by the swap permutation exchanges both the diagonal
        // entries and the off-diagonal pair.
        TwoByTwoSolution {
            d1: p.d2,
            d2: p.d1,
            b: c,
            c: b,
            case_tag,
            diagonal_swapped: true,
        }
    } else {
        TwoByTwoSolution {
            d1: p.d1,
            d2: p.d2,
            b,
            c,
            case_tag,
            diagonal_swapped: false,
        }
    }
}

/// Dimension of the manifold of real `m x n` matrices whose distinct,
/// strictly positive singular values occur with the given multiplicities.
pub fn manifold_dimension(m: usize, n: usize, multiplicities: &[usize]) -> Result<usize> {
    if n == 0 || m < n {
        return Err(Error::BadMultiplicities(format!(
            "need m >= n >= 1, got m = {m}, n = {n}"
        )));
    }
    if multiplicities.is_empty() || multiplicities.contains(&0) {
        return Err(Error::BadMultiplicities("multiplicities must be positive".into()));
    }
    let total: usize = multiplicities.iter().sum();
    if total != n {
        return Err(Error::BadMultiplicities(format!(
            "multiplicities sum to {total}, expected {n}"
        )));
    }
    let stabilizer: usize = multiplicities.iter().map(|k| k * (k - 1) / 2).sum();
    Ok(n * (m - 1) - stabilizer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> SingularSpectrum {
        SingularSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sing_thompson_examples() {
        let v = sing_thompson_feasible(&spec(&[4.0, 2.0, 1.0]), &[4.0, 2.0, 1.0]).unwrap();
        assert!(v.feasible);

        let v = sing_thompson_feasible(&spec(&[3.0, 1.0]), &[2.0, 1.0]).unwrap();
        assert!(v.feasible);

        let v = sing_thompson_feasible(&spec(&[2.0, 2.0]), &[2.5, 0.0]).unwrap();
        assert!(!v.feasible);
        assert_eq!(v.violations[0], Violation::PartialSum { k: 1 });
    }

    #[test]
    fn sing_thompson_alternating_condition() {
        let v = sing_thompson_feasible(&spec(&[1.0, 1.0]), &[1.5, 0.0]).unwrap();
        assert_eq!(
            v.violations,
            vec![Violation::PartialSum { k: 1 }, Violation::Alternating]
        );
        assert!(
            sing_thompson_feasible(&spec(&[1.0, 0.0]), &[0.5, 0.5])
                .unwrap()
                .feasible
        );
        // Partial sums hold; 0.5 - 0 > 1 - 1.
        let v = sing_thompson_feasible(&spec(&[1.0, 1.0]), &[0.5, 0.0]).unwrap();
        assert_eq!(v.violations, vec![Violation::Alternating]);
    }

    #[test]
    fn sing_thompson_signed_and_mismatch() {
        let v = sing_thompson_feasible(&spec(&[3.0, 1.0]), &[-1.0, 2.0]).unwrap();
        assert!(v.feasible);
        assert!(matches!(
            sing_thompson_feasible(&spec(&[3.0, 1.0]), &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn two_by_two_verdicts() {
        let s = spec(&[3.0, 1.0]);
        assert_eq!(nn2x2_feasible(&s, &[1.0, 1.0]).unwrap(), TwoByTwoCase::FeasibleCase2);
        assert_eq!(nn2x2_feasible(&s, &[2.0, 1.5]).unwrap(), TwoByTwoCase::FeasibleCase1);
        assert_eq!(nn2x2_feasible(&s, &[2.0, 1.0]).unwrap(), TwoByTwoCase::Infeasible);
        assert_eq!(nn2x2_feasible(&s, &[1.5, 2.0]).unwrap(), TwoByTwoCase::FeasibleCase1);
        assert!(matches!(
            nn2x2_feasible(&s, &[-1.0, 1.0]),
            Err(Error::NegativeDiagonal { index: 0, .. })
        ));
    }

    #[test]
    fn two_by_two_constructions() {
        let s = spec(&[3.0, 1.0]);
        let sol = nn2x2_construct(&s, &[2.0, 1.5]).unwrap();
        assert!((sol.b - 3.75f64.sqrt()).abs() < 1e-14);
        assert_eq!(sol.c, 0.0);
        assert_eq!(sol.case_tag, DeterminantSign::DetNonneg);

        let sol = nn2x2_construct(&s, &[1.0, 1.0]).unwrap();
        assert!((sol.b - 2.0).abs() < 1e-14 && (sol.c - 2.0).abs() < 1e-14);
        assert_eq!(sol.case_tag, DeterminantSign::DetNeg);

        let sol = nn2x2_construct(&spec(&[5.0, 5.0]), &[5.0, 5.0]).unwrap();
        assert_eq!((sol.b, sol.c), (0.0, 0.0));

        assert_eq!(nn2x2_construct(&s, &[2.0, 1.0]), Err(Error::InfeasibleInput));
    }

    #[test]
    fn swapped_diagonal_is_restored() {
        let s = spec(&[3.0, 1.0]);
        let sol = nn2x2_construct(&s, &[1.5, 2.0]).unwrap();
        assert!(sol.diagonal_swapped);
        assert_eq!((sol.d1, sol.d2), (1.5, 2.0));
        let sv = crate::svd::singular_values_only(&sol.matrix()).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-12 && (sv[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn construct_specific_case() {
        // sigma1 sigma2 small and sigma1 - sigma2 large: both cases hold.
        let s = spec(&[5.0, 0.1]);
        let d = [1.0, 1.0];
        let one = nn2x2_construct_case(&s, &d, TwoByTwoCase::FeasibleCase1).unwrap();
        let two = nn2x2_construct_case(&s, &d, TwoByTwoCase::FeasibleCase2).unwrap();
        assert_ne!(one, two);
        for sol in [one, two] {
            let sv = crate::svd::singular_values_only(&sol.matrix()).unwrap();
            assert!((sv[0] - 5.0).abs() < 1e-12 && (sv[1] - 0.1).abs() < 1e-12);
        }
        assert!(nn2x2_construct_case(&spec(&[3.0, 1.0]), &d, TwoByTwoCase::FeasibleCase1).is_err());
    }

    #[test]
    fn manifold_dimension_formula() {
        assert_eq!(manifold_dimension(2, 2, &[1, 1]).unwrap(), 2);
        assert_eq!(manifold_dimension(2, 2, &[2]).unwrap(), 1);
        assert_eq!(manifold_dimension(3, 2, &[1, 1]).unwrap(), 4);
        assert!(manifold_dimension(2, 2, &[1]).is_err());
        assert!(manifold_dimension(2, 2, &[0, 2]).is_err());
        assert!(manifold_dimension(1, 2, &[1, 1]).is_err());
    }

    #[test]
    fn spectrum_validation() {
        assert!(SingularSpectrum::new(vec![1.0, 2.0]).is_err());
        assert!(SingularSpectrum::new(vec![1.0, -0.5]).is_err());
        assert!(SingularSpectrum::new(vec![]).is_err());
        let (s, changed) = SingularSpectrum::sorted(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        assert!(changed);
    }
}
