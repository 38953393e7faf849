//! Nearest-point maps onto the constraint sets of the problem.
//!
//! * fixed singular values (nonconvex): [`project_spectrum`]
//! * nonnegative orthant: [`project_nonnegative`]
//! * prescribed entries, the diagonal being a special case: [`project_entries`]
//! * symmetric matrices: [`project_symmetric`]
//!
//! The convex sets decouple entrywise (or per symmetric pair), so their
//! intersection is projected exactly by [`project_constraints`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::SingularSpectrum;
use crate::matrix::{frobenius, DenseMatrix};
use crate::svd::{compute_svd, singular_values_only, SvdFactors};

/// Prescribed values at distinct positions (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryConstraint {
    positions: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl EntryConstraint {
    pub fn new(positions: Vec<(usize, usize)>, values: Vec<f64>) -> Result<Self> {
        if positions.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: positions.len(),
                got: values.len(),
            });
        }
        let mut seen = std::collections::HashSet::with_capacity(positions.len());
        for (&(row, col), &value) in positions.iter().zip(&values) {
            if !seen.insert((row, col)) {
                return Err(Error::DuplicateIndex { row, col });
            }
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeValue { row, col, value });
            }
        }
        Ok(Self { positions, values })
    }

    pub fn empty() -> Self {
        Self {
            positions: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Constraint `A_ii = d_i` for every `i`.
    pub fn diagonal(d: &[f64]) -> Result<Self> {
        for (index, &value) in d.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeDiagonal { index, value });
            }
        }
        Self::new((0..d.len()).map(|i| (i, i)).collect(), d.to_vec())
    }

    pub fn from_triples(triples: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(
            triples.iter().map(|&(i, j, _)| (i, j)).collect(),
            triples.iter().map(|&(_, _, v)| v).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.positions.iter().copied().zip(self.values.iter().copied())
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The diagonal values when the constraint fixes exactly the full
    /// diagonal of an `n`-column matrix.
    pub fn as_diagonal(&self, n: usize) -> Option<Vec<f64>> {
        if self.len() != n {
            return None;
        }
        let mut d = vec![f64::NAN; n];
        for ((i, j), v) in self.iter() {
            if i != j || i >= n {
                return None;
            }
            d[i] = v;
        }
        Some(d)
    }

    pub fn check_bounds(&self, rows: usize, cols: usize) -> Result<()> {
        for &(row, col) in &self.positions {
            if row >= rows || col >= cols {
                return Err(Error::IndexOutOfBounds { row, col, rows, cols });
            }
        }
        Ok(())
    }

    /// Adds the mirror `(j, i)` of every off-diagonal position.
    fn symmetric_closure(&self) -> Result<Self> {
        let mut positions = self.positions.clone();
        let mut values = self.values.clone();
        for ((i, j), v) in self.iter() {
            if i == j {
                continue;
            }
            match self.positions.iter().position(|&p| p == (j, i)) {
                Some(t) if self.values[t] != v => return Err(Error::AsymmetricConstraint { row: i, col: j }),
                Some(_) => {}
                None => {
                    positions.push((j, i));
                    values.push(v);
                }
            }
        }
        Self::new(positions, values)
    }
}

/// Full description of one problem instance: shape, target singular values,
/// prescribed entries and the structural flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSetSpec {
    rows: usize,
    cols: usize,
    spectrum: SingularSpectrum,
    entries: Option<EntryConstraint>,
    nonnegative: bool,
    symmetric: bool,
}

impl ConstraintSetSpec {
    /// Validates shapes. For symmetric problems every prescribed off-diagonal
    /// entry is mirrored.
    pub fn new(
        rows: usize,
        cols: usize,
        spectrum: SingularSpectrum,
        entries: Option<EntryConstraint>,
        nonnegative: bool,
        symmetric: bool,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if rows < cols {
            return Err(Error::WideMatrix { rows, cols });
        }
        if symmetric && rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if spectrum.len() != cols {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: spectrum.len(),
            });
        }
        let entries = match entries {
            Some(e) => {
                e.check_bounds(rows, cols)?;
                Some(if symmetric { e.symmetric_closure()? } else { e })
            }
            None => None,
        };
        Ok(Self {
            rows,
            cols,
            spectrum,
            entries,
            nonnegative,
            symmetric,
        })
    }

    /// Nonnegative `rows x cols` problem with prescribed diagonal.
    pub fn with_diagonal(rows: usize, cols: usize, spectrum: SingularSpectrum, d: &[f64]) -> Result<Self> {
        if d.len() != cols {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: d.len(),
            });
        }
        Self::new(rows, cols, spectrum, Some(EntryConstraint::diagonal(d)?), true, false)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn spectrum(&self) -> &SingularSpectrum {
        &self.spectrum
    }

    pub fn entries(&self) -> Option<&EntryConstraint> {
        self.entries.as_ref()
    }

    pub fn nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }
}

/// A nearest matrix to `a` with singular values `sigma`: `U diag(sigma) V^T`
/// from an SVD of `a`.
pub fn project_spectrum(a: &DenseMatrix, sigma: &SingularSpectrum) -> Result<DenseMatrix> {
    check_spectrum_shape(a, sigma)?;
    compute_svd(a)?.compose(sigma.values())
}

/// As [`project_spectrum`], reusing factors already computed for `a`.
pub fn project_spectrum_from(factors: &SvdFactors, sigma: &SingularSpectrum) -> Result<DenseMatrix> {
    factors.compose(sigma.values())
}

fn check_spectrum_shape(a: &DenseMatrix, sigma: &SingularSpectrum) -> Result<()> {
    if a.rows() < a.cols() {
        return Err(Error::WideMatrix {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if sigma.len() != a.cols() {
        return Err(Error::LengthMismatch {
            expected: a.cols(),
            got: sigma.len(),
        });
    }
    Ok(())
}

/// Entrywise `max(a_ij, 0)`.
pub fn project_nonnegative(a: &DenseMatrix) -> DenseMatrix {
    let mut out = a.clone();
    clamp_in_place(out.data_mut());
    out
}

fn clamp_in_place(data: &mut [f64]) {
    for x in data {
        // Also maps -0.0 to +0.0.
        if x.is_nan() || *x <= 0.0 {
            *x = 0.0;
        }
    }
}

/// Overwrites the prescribed entries.
pub fn project_entries(a: &DenseMatrix, c: &EntryConstraint) -> Result<DenseMatrix> {
    c.check_bounds(a.rows(), a.cols())?;
    let mut out = a.clone();
    overwrite_in_place(&mut out, c);
    Ok(out)
}

fn overwrite_in_place(a: &mut DenseMatrix, c: &EntryConstraint) {
    let cols = a.cols();
    let data = a.data_mut();
    for ((i, j), v) in c.iter() {
        data[i * cols + j] = v;
    }
}

/// `(A + A^T) / 2`.
pub fn project_symmetric(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let mut out = a.clone();
    symmetrize_in_place(&mut out);
    Ok(out)
}

fn symmetrize_in_place(a: &mut DenseMatrix) {
    let n = a.rows();
    let data = a.data_mut();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
            data[i * n + j] = avg;
            data[j * n + i] = avg;
        }
    }
}

/// Nearest point of the convex part of `spec` (nonnegativity, prescribed
/// entries, symmetry). Order: symmetrize, clamp, overwrite.
pub fn project_constraints(a: &DenseMatrix, spec: &ConstraintSetSpec) -> Result<DenseMatrix> {
    if a.shape() != spec.shape() {
        return Err(Error::ShapeMismatch {
            expected: spec.shape(),
            got: a.shape(),
        });
    }
    let mut out = a.clone();
    if spec.symmetric {
        symmetrize_in_place(&mut out);
    }
    if spec.nonnegative {
        clamp_in_place(out.data_mut());
    }
    if let Some(c) = &spec.entries {
        overwrite_in_place(&mut out, c);
    }
    Ok(out)
}

/// Distances of a matrix to each constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipResiduals {
    /// `||sorted sigma(A) - sigma||_2 / ||sigma||_2` (absolute when `sigma = 0`).
    pub spectrum_residual: f64,
    /// `||min(A, 0)||_F`.
    pub negativity: f64,
    /// `max_t |A[i_t, j_t] - k_t|`, zero without prescribed entries.
    pub entry_residual: f64,
    /// `||A - A^T||_F / 2` for symmetric problems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymmetry: Option<f64>,
}

pub fn project_membership_residuals(a: &DenseMatrix, spec: &ConstraintSetSpec) -> Result<MembershipResiduals> {
    if a.shape() != spec.shape() {
        return Err(Error::ShapeMismatch {
            expected: spec.shape(),
            got: a.shape(),
        });
    }
    let target = spec.spectrum.values();
    let actual = singular_values_only(a)?;
    let diff: Vec<f64> = actual.iter().zip(target).map(|(x, y)| x - y).collect();
    let target_norm = frobenius(target);
    let spectrum_residual = if target_norm > 0.0 {
        frobenius(&diff) / target_norm
    } else {
        frobenius(&diff)
    };

    let negatives: Vec<f64> = a.as_slice().iter().map(|&x| x.min(0.0)).collect();
    let negativity = frobenius(&negatives);

    let entry_residual = spec.entries.as_ref().map_or(0.0, |c| {
        c.iter().map(|((i, j), v)| (a.get(i, j) - v).abs()).fold(0.0, f64::max)
    });

    let asymmetry = if spec.symmetric {
        Some(a.distance(&a.transpose())? / 2.0)
    } else {
        None
    };

    Ok(MembershipResiduals {
        spectrum_residual,
        negativity,
        entry_residual,
        asymmetry,
    })
}
