#![allow(clippy::needless_range_loop)]

use nisvp_core::{
    compute_svd, manifold_dimension, nn2x2_construct, nn2x2_feasible, sing_thompson_feasible, DenseMatrix, MatrixRng,
    RngSeed, SingularSpectrum, TwoByTwoCase,
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut s: Vec<Vec<f64>> = a.iter_rows().map(<[f64]>::to_vec).collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (kp, kq) = (s[k][p], s[k][q]);
                    s[k][p] = c * kp - sn * kq;
                    s[k][q] = sn * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (s[p][k], s[q][k]);
                    s[p][k] = c * pk - sn * qk;
                    s[q][k] = sn * pk + c * qk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| s[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

#[test]
fn embedding_has_plus_minus_singular_values() {
    let mut rng = MatrixRng::new(RngSeed(11));
    for (m, n) in [(3, 3), (3, 2), (4, 1), (5, 3), (2, 2)] {
        let b = rng.uniform_matrix(m, n, 0.0, 10.0).unwrap();
        let size = m + n;
        let mut data = vec![0.0; size * size];
        for i in 0..m {
            for j in 0..n {
                data[i * size + m + j] = b.get(i, j);
                data[(m + j) * size + i] = b.get(i, j);
            }
        }
        let eig = symmetric_eigenvalues(&DenseMatrix::new(size, size, data).unwrap());
        let sigma = compute_svd(&b).unwrap().singular_values;
        let mut expected: Vec<f64> = sigma.iter().flat_map(|&s| [s, -s]).collect();
        expected.extend(std::iter::repeat_n(0.0, m - n));
        expected.sort_by(f64::total_cmp);
        for (e, x) in eig.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-10, "{m}x{n}: {eig:?} vs {expected:?}");
        }
    }
}

/// Column rank by Gaussian elimination with partial pivoting.
fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            let f = rows[i][c] / rows[r][c];
            for k in c..cols {
                rows[i][k] -= f * rows[r][k];
            }
        }
        r += 1;
    }
    r
}

/// Dimension of `{H X - X K}` over skew `H` (m x m) and `K` (n x n).
fn tangent_rank(x: &DenseMatrix) -> usize {
    let (m, n) = x.shape();
    let mut generators: Vec<DenseMatrix> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let mut h = vec![0.0; m * m];
            h[i * m + j] = 1.0;
            h[j * m + i] = -1.0;
            generators.push(DenseMatrix::new(m, m, h).unwrap().matmul(x).unwrap());
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut k = vec![0.0; n * n];
            k[i * n + j] = 1.0;
            k[j * n + i] = -1.0;
            generators.push(x.matmul(&DenseMatrix::new(n, n, k).unwrap()).unwrap());
        }
    }
    // Rows are matrix entries, columns are generators.
    let rows: Vec<Vec<f64>> = (0..m * n)
        .map(|e| generators.iter().map(|g| g.as_slice()[e]).collect())
        .collect();
    rank(rows, 1e-9)
}

fn point_with_spectrum(rng: &mut MatrixRng, m: usize, n: usize, sigma: &[f64]) -> DenseMatrix {
    let g = rng.uniform_matrix(m, n, 0.0, 1.0).unwrap();
    compute_svd(&g).unwrap().compose(sigma).unwrap()
}

#[test]
fn manifold_dimension_matches_tangent_rank() {
    let mut rng = MatrixRng::new(RngSeed(12));
    let cases: [(usize, usize, &[f64], &[usize]); 8] = [
        (2, 2, &[3.0, 1.0], &[1, 1]),
        (2, 2, &[2.0, 2.0], &[2]),
        (3, 2, &[3.0, 1.0], &[1, 1]),
        (3, 3, &[4.0, 4.0, 1.0], &[2, 1]),
        (4, 3, &[5.0, 2.0, 1.0], &[1, 1, 1]),
        (4, 4, &[3.0, 3.0, 3.0, 3.0], &[4]),
        (5, 3, &[2.0, 2.0, 1.0], &[2, 1]),
        (6, 2, &[1.0, 0.5], &[1, 1]),
    ];
    for (m, n, sigma, mult) in cases {
        let x = point_with_spectrum(&mut rng, m, n, sigma);
        assert_eq!(
            tangent_rank(&x),
            manifold_dimension(m, n, mult).unwrap(),
            "{m}x{n} {mult:?}"
        );
    }
}

fn sv2(g: &DenseMatrix) -> (f64, f64) {
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let p = ((a + d).powi(2) + (c - b).powi(2)).sqrt();
    let q = ((a - d).powi(2) + (b + c).powi(2)).sqrt();
    (0.5 * (p + q), 0.5 * (p - q).abs())
}

#[test]
fn case_two_implies_case_one_sum_and_difference() {
    let mut rng = MatrixRng::new(RngSeed(13));
    let mut case_two = 0;
    for _ in 0..10_000 {
        let mut s = [rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)];
        s.sort_by(|a, b| b.total_cmp(a));
        let mut d = [rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)];
        d.sort_by(|a, b| b.total_cmp(a));
        if s[0] - s[1] >= d[0] + d[1] {
            case_two += 1;
            assert!(s[0] + s[1] >= d[0] + d[1]);
            assert!(s[0] - s[1] >= d[0] - d[1]);
        }
    }
    assert!(case_two > 1000);
}

#[test]
fn nonnegative_existence_implies_real_existence() {
    let mut rng = MatrixRng::new(RngSeed(14));
    let mut feasible = 0;
    for _ in 0..10_000 {
        let mut s = vec![rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)];
        s.sort_by(|a, b| b.total_cmp(a));
        let d = [rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)];
        let sigma = SingularSpectrum::new(s).unwrap();
        if nn2x2_feasible(&sigma, &d).unwrap().is_feasible() {
            feasible += 1;
            assert!(sing_thompson_feasible(&sigma, &d).unwrap().feasible, "{sigma:?} {d:?}");
        }
    }
    assert!(feasible > 100);
}

#[test]
fn constructed_matrices_round_trip_through_svd() {
    let mut rng = MatrixRng::new(RngSeed(15));
    for _ in 0..2000 {
        let g = rng.uniform_matrix(2, 2, 0.0, 10.0).unwrap();
        let (s1, s2) = sv2(&g);
        let sigma = SingularSpectrum::new(vec![s1, s2]).unwrap();
        let d = g.diagonal();
        assert_ne!(nn2x2_feasible(&sigma, &d).unwrap(), TwoByTwoCase::Infeasible);
        let built = nn2x2_construct(&sigma, &d).unwrap().matrix();
        assert!(built.is_nonnegative());
        assert_eq!(built.diagonal(), d);
        let got = compute_svd(&built).unwrap().singular_values;
        assert!(
            (got[0] - s1).abs() <= 1e-10 && (got[1] - s2).abs() <= 1e-10,
            "{got:?} vs ({s1}, {s2})"
        );
    }
}

#[test]
fn diagonal_realisation_is_always_feasible() {
    let mut rng = MatrixRng::new(RngSeed(16));
    for n in 1..8 {
        let mut s: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 10.0)).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        let sigma = SingularSpectrum::new(s.clone()).unwrap();
        assert!(sing_thompson_feasible(&sigma, &s).unwrap().feasible);
    }
}
