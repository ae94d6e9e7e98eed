//! Very sparse random projection (Achlioptas / Li scheme): entries in
//! `{-1, 0, +1} * sqrt(s/k)` with `s = sqrt(p)`, i.e. density `1/sqrt(p)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// Seed-deterministic sparse projection matrix, stored by row.
#[derive(Debug, Clone)]
pub struct SparseRandomProjection {
    p: usize,
    k: usize,
    seed: u64,
    density: f64,
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseRandomProjection {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn nonzeros(&self) -> usize {
        self.cols.len()
    }

    /// Apply to every column of `x`.
    pub fn reduce(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.p() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "data has p={} but projection expects p={}",
                x.p(),
                self.p
            )));
        }
        x.ensure_finite()?;
        let mut out = DataMatrix::zeros(self.k, x.n())?;
        for s in 0..x.n() {
            let col = x.column(s);
            let dst = out.column_mut(s);
            for (q, slot) in dst.iter_mut().enumerate() {
                let lo = self.row_offsets[q];
                let hi = self.row_offsets[q + 1];
                let mut acc = 0.0;
                for t in lo..hi {
                    acc += self.vals[t] * col[self.cols[t] as usize];
                }
                *slot = acc;
            }
        }
        Ok(out)
    }

    /// Apply to one signal.
    pub fn reduce_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = DataMatrix::from_vec(self.p, 1, x.to_vec())?;
        Ok(self.reduce(&m)?.values().to_vec())
    }
}

/// Draw a `k x p` very sparse random projection. Entries are generated
/// row-major from a ChaCha stream, so the matrix depends only on
/// `(p, k, seed)`.
pub fn sparse_random_projection(p: usize, k: usize, seed: u64) -> Result<SparseRandomProjection> {
    if p == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "projection needs p >= 1 and k >= 1, got p={p}, k={k}"
        )));
    }
    let sparsity = (p as f64).sqrt();
    let density = 1.0 / sparsity;
    let value = (sparsity / k as f64).sqrt();
    let half = density / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut row_offsets = Vec::with_capacity(k + 1);
    row_offsets.push(0usize);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for _ in 0..k {
        for j in 0..p {
            let u: f64 = rng.random();
            if u < half {
                cols.push(j as u32);
                vals.push(value);
            } else if u < density {
                cols.push(j as u32);
                vals.push(-value);
            }
        }
        row_offsets.push(cols.len());
    }
    Ok(SparseRandomProjection {
        p,
        k,
        seed,
        density,
        row_offsets,
        cols,
        vals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_nonzeros_per_row() {
        let p = 4096; // sqrt(p) = 64
        let proj = sparse_random_projection(p, 32, 9).unwrap();
        let per_row = proj.nonzeros() as f64 / 32.0;
        // expectation is sqrt(p) = 64; allow generous sampling slack
        assert!((per_row - 64.0).abs() < 12.0, "per_row = {per_row}");
    }

    #[test]
    fn bit_reproducible_from_seed() {
        let a = sparse_random_projection(500, 20, 123).unwrap();
        let b = sparse_random_projection(500, 20, 123).unwrap();
        assert_eq!(a.cols, b.cols);
        assert_eq!(a.vals, b.vals);
        let c = sparse_random_projection(500, 20, 124).unwrap();
        assert_ne!(a.cols, c.cols);
    }

    #[test]
    fn rejects_zero_dims() {
        assert!(sparse_random_projection(0, 3, 0).is_err());
        assert!(sparse_random_projection(3, 0, 0).is_err());
    }
}
