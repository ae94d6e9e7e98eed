//! Nystrom feature mapping for the linear kernel: uniformly subsample `k`
//! training columns, then normalize by the pseudo-inverse square root of
//! their Gram matrix.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// Eigenvalues of the subsample Gram matrix below this fraction of the
/// largest one are treated as zero in the pseudo-inverse.
pub const NYSTROM_SV_TOLERANCE: f64 = 1e-10;

/// Fitted Nystrom map: `k x p` dense mapping plus the sampled column ids.
#[derive(Debug, Clone)]
pub struct NystromMap {
    selected: Vec<usize>,
    /// Row-major `k x p`.
    weights: Vec<f64>,
    k: usize,
    p: usize,
}

impl NystromMap {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Training column indices, ascending.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// Row-major `k x p` mapping weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn from_parts(selected: Vec<usize>, weights: Vec<f64>, k: usize, p: usize) -> Result<Self> {
        if weights.len() != k * p {
            return Err(Error::DimensionMismatch(format!(
                "nystrom map needs {} weights, got {}",
                k * p,
                weights.len()
            )));
        }
        if selected.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "nystrom map needs {k} selected columns, got {}",
                selected.len()
            )));
        }
        Ok(NystromMap {
            selected,
            weights,
            k,
            p,
        })
    }

    pub fn reduce(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.p() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "data has p={} but map expects p={}",
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
                let row = &self.weights[q * self.p..(q + 1) * self.p];
                *slot = row.iter().zip(col).map(|(w, v)| w * v).sum();
            }
        }
        Ok(out)
    }
}

/// Learn a Nystrom feature mapping from `k` uniformly sampled columns of the
/// training data (without replacement, seed-deterministic).
pub fn nystrom_fit(x: &DataMatrix, k: usize, seed: u64) -> Result<NystromMap> {
    let n = x.n();
    let p = x.p();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "nystrom needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    x.ensure_finite()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    let (sampled, _) = indices.partial_shuffle(&mut rng, k);
    let mut selected = sampled.to_vec();
    selected.sort_unstable();

    // Gram matrix of the subsampled columns.
    let mut gram = DMatrix::<f64>::zeros(k, k);
    for a in 0..k {
        let ca = x.column(selected[a]);
        for b in a..k {
            let cb = x.column(selected[b]);
            let dot: f64 = ca.iter().zip(cb).map(|(u, v)| u * v).sum();
            gram[(a, b)] = dot;
            gram[(b, a)] = dot;
        }
    }

    // Pseudo-inverse square root via the symmetric eigendecomposition.
    let eig = gram.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let coeffs: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if l > NYSTROM_SV_TOLERANCE * max_eig && l > 0.0 {
                1.0 / l.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    // pinv_sqrt = V diag(coeffs) V^T
    let v = &eig.eigenvectors;
    let mut pinv_sqrt = DMatrix::<f64>::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let mut acc = 0.0;
            for (t, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    acc += v[(a, t)] * c * v[(b, t)];
                }
            }
            pinv_sqrt[(a, b)] = acc;
            pinv_sqrt[(b, a)] = acc;
        }
    }

    // map = pinv_sqrt * X_selected^T, row-major k x p
    let mut weights = vec![0.0f64; k * p];
    for q in 0..k {
        let row = &mut weights[q * p..(q + 1) * p];
        for (a, &col_idx) in selected.iter().enumerate() {
            let c = pinv_sqrt[(q, a)];
            if c == 0.0 {
                continue;
            }
            for (slot, v) in row.iter_mut().zip(x.column(col_idx)) {
                *slot += c * v;
            }
        }
    }

    NystromMap::from_parts(selected, weights, k, p)
}
