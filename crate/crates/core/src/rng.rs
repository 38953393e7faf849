//! Seeded random matrices.
//!
//! Streams come from ChaCha8 seeded through `seed_from_u64`, so a given seed
//! yields the same bits on every platform. Uniform samples are formed from
//! the top 53 bits of each draw.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Seed for every random stream in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Derives an independent child seed from this seed and a path of
    /// integers (e.g. matrix size and trial index).
    pub fn derive(self, path: &[u64]) -> RngSeed {
        let mut h = self.0;
        for &p in path {
            h = splitmix(h ^ splitmix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        RngSeed(h)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A reproducible stream of uniform samples and random matrices.
#[derive(Debug, Clone)]
pub struct MatrixRng {
    inner: ChaCha8Rng,
}

impl MatrixRng {
    pub fn new(seed: RngSeed) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed.0),
        }
    }

    /// Uniform sample on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn next_seed(&mut self) -> RngSeed {
        RngSeed(self.inner.next_u64())
    }

    /// `m x n` matrix with i.i.d. entries uniform on `[lo, hi]`.
    pub fn uniform_matrix(&mut self, m: usize, n: usize, lo: f64, hi: f64) -> Result<DenseMatrix> {
        check_range(lo, hi)?;
        if m == 0 || n == 0 {
            return Err(Error::EmptyMatrix { rows: m, cols: n });
        }
        let data = (0..m * n).map(|_| self.uniform(lo, hi)).collect();
        Ok(DenseMatrix::from_raw(m, n, data))
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
        return Err(Error::BadRange { lo, hi });
    }
    Ok(())
}

/// Random nonnegative `m x n` matrix with entries uniform on `[lo, hi]`.
pub fn random_nonnegative(m: usize, n: usize, lo: f64, hi: f64, seed: RngSeed) -> Result<DenseMatrix> {
    MatrixRng::new(seed).uniform_matrix(m, n, lo, hi)
}
