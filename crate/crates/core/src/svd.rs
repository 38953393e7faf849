//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! For `A` with `m >= n` the kernel orthogonalises the columns of `W = A V`
//! by cyclic sweeps of plane rotations accumulated into `V`. At convergence
//! the column norms of `W` are the singular values and the normalised columns
//! are the leading left singular vectors. The remaining columns of `U` are an
//! orthonormal completion, so `U` is always a full `m x m` orthogonal matrix.

use crate::error::{Error, Result};
use crate::matrix::{frobenius, DenseMatrix};

/// Sweeps allowed per column before giving up.
pub const SWEEPS_PER_COLUMN: usize = 30;

/// `A = U diag(singular_values) V^T` with `U` (m x m) and `V` (n x n) orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    /// Descending, nonnegative, length `n`.
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    /// `U diag(values) V^T` using the leading `n` columns of `U`.
    pub fn compose(&self, values: &[f64]) -> Result<DenseMatrix> {
        let (m, n) = (self.u.rows(), self.v.rows());
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        let u = self.u.as_slice();
        let v = self.v.as_slice();
        let mut out = vec![0.0; m * n];
        let mut scaled = vec![0.0; n];
        for i in 0..m {
            for k in 0..n {
                scaled[k] = u[i * m + k] * values[k];
            }
            let row = &mut out[i * n..(i + 1) * n];
            for (j, o) in row.iter_mut().enumerate() {
                let vj = &v[j * n..(j + 1) * n];
                *o = scaled.iter().zip(vj).map(|(a, b)| a * b).sum();
            }
        }
        DenseMatrix::new(m, n, out)
    }

    /// `U diag(singular_values) V^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.compose(&self.singular_values)
            .expect("factors are internally consistent")
    }
}

/// Full SVD of `a` (requires `rows >= cols`).
pub fn compute_svd(a: &DenseMatrix) -> Result<SvdFactors> {
    jacobi_svd(a, None)
}

/// Full SVD of `a`, starting the rotations from the right singular vectors
/// of a nearby matrix. Any orthogonal `n x n` hint yields a valid SVD; a good
/// hint only cuts the number of sweeps.
pub fn compute_svd_with_hint(a: &DenseMatrix, v_hint: &DenseMatrix) -> Result<SvdFactors> {
    let n = a.cols();
    if v_hint.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            got: v_hint.shape(),
        });
    }
    jacobi_svd(a, Some(v_hint))
}

/// Singular values of `a` in descending order. Wide inputs are transposed.
pub fn singular_values_only(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows() < a.cols() {
        return Ok(compute_svd(&a.transpose())?.singular_values);
    }
    Ok(compute_svd(a)?.singular_values)
}

/// Column-major `rows x cols` scratch matrix.
struct Columns {
    rows: usize,
    data: Vec<f64>,
}

impl Columns {
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn pair_mut(&mut self, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(p < q);
        let r = self.rows;
        let (head, tail) = self.data.split_at_mut(q * r);
        (&mut head[p * r..(p + 1) * r], &mut tail[..r])
    }

    fn rotate(&mut self, p: usize, q: usize, c: f64, s: f64) {
        let (xp, xq) = self.pair_mut(p, q);
        for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = c * x - s * y;
            *b = s * x + c * y;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn jacobi_svd(a: &DenseMatrix, v_hint: Option<&DenseMatrix>) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::WideMatrix { rows: m, cols: n });
    }

    let mut v = Columns {
        rows: n,
        data: vec![0.0; n * n],
    };
    match v_hint {
        Some(h) => {
            for j in 0..n {
                for i in 0..n {
                    v.data[j * n + i] = h.get(i, j);
                }
            }
            orthonormalize_columns(&mut v, n);
        }
        None => {
            for j in 0..n {
                v.data[j * n + j] = 1.0;
            }
        }
    }

    // W = A V, column-major.
    let mut w = Columns {
        rows: m,
        data: vec![0.0; m * n],
    };
    let ad = a.as_slice();
    for j in 0..n {
        let vj = v.col(j).to_vec();
        for i in 0..m {
            w.data[j * m + i] = dot(&ad[i * n..(i + 1) * n], &vj);
        }
    }

    let tol = (m as f64).sqrt() * f64::EPSILON;
    let max_sweeps = SWEEPS_PER_COLUMN * n.max(1);
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (wp, wq) = (w.col(p), w.col(q));
                    (dot(wp, wp), dot(wq, wq), dot(wp, wq))
                };
                if gamma == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                w.rotate(p, q, c, s);
                v.rotate(p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    let norms: Vec<f64> = (0..n).map(|j| frobenius(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();

    // U columns: normalised W columns where the singular value is nonzero,
    // completed to an orthonormal basis of R^m.
    let mut u_cols: Vec<Option<Vec<f64>>> = vec![None; m];
    for (slot, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        if sigma > f64::MIN_POSITIVE {
            u_cols[slot] = Some(w.col(j).iter().map(|x| x / sigma).collect());
        }
    }
    complete_basis(&mut u_cols, m);

    let mut u = vec![0.0; m * m];
    for (k, col) in u_cols.iter().enumerate() {
        let col = col.as_ref().expect("basis completed");
        for i in 0..m {
            u[i * m + k] = col[i];
        }
    }
    let mut vr = vec![0.0; n * n];
    for (k, &j) in order.iter().enumerate() {
        let col = v.col(j);
        for i in 0..n {
            vr[i * n + k] = col[i];
        }
    }

    Ok(SvdFactors {
        u: DenseMatrix::new(m, m, u)?,
        singular_values,
        v: DenseMatrix::new(n, n, vr)?,
    })
}

/// Two-pass modified Gram-Schmidt on the columns of `x`.
fn orthonormalize_columns(x: &mut Columns, count: usize) {
    let r = x.rows;
    for j in 0..count {
        for _ in 0..2 {
            for k in 0..j {
                let (ck, cj) = x.pair_mut(k, j);
                let proj = dot(ck, cj);
                for (a, b) in cj.iter_mut().zip(ck.iter()) {
                    *a -= proj * b;
                }
            }
        }
        let col = &mut x.data[j * r..(j + 1) * r];
        let norm = frobenius(col);
        if norm > 0.0 {
            col.iter_mut().for_each(|a| *a /= norm);
        }
    }
}

/// Fills the empty slots of `cols` with unit vectors orthogonal to every
/// other column. Candidates are standard basis vectors, chosen greedily by
/// largest remaining component.
fn complete_basis(cols: &mut [Option<Vec<f64>>], m: usize) {
    let mut filled: Vec<Vec<f64>> = cols.iter().flatten().cloned().collect();
    let mut leftover = vec![1.0; m];
    for c in &filled {
        for (l, x) in leftover.iter_mut().zip(c) {
            *l -= x * x;
        }
    }
    for slot in cols.iter_mut() {
        if slot.is_some() {
            continue;
        }
        let k = leftover
            .iter()
            .enumerate()
            .fold(0, |best, (i, &l)| if l > leftover[best] { i } else { best });
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        for _ in 0..2 {
            for c in &filled {
                let proj = dot(c, &e);
                for (a, b) in e.iter_mut().zip(c) {
                    *a -= proj * b;
                }
            }
        }
        let norm = frobenius(&e);
        e.iter_mut().for_each(|a| *a /= norm);
        for (l, x) in leftover.iter_mut().zip(&e) {
            *l -= x * x;
        }
        filled.push(e.clone());
        *slot = Some(e);
    }
}
