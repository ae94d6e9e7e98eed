//! Dense feature-by-sample matrix.
//!
//! Storage is column-major: one column is one signal `x` in `R^p` and is a
//! contiguous slice, which is the access pattern of every reducer.

use crate::error::{Error, Result};

/// Dense `p x n` matrix of `f64`, column-major. Rows index features, columns
/// index samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    p: usize,
    n: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn zeros(p: usize, n: usize) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got p={p}, n={n}"
            )));
        }
        let len = p.checked_mul(n).ok_or_else(|| {
            Error::InvalidArgument(format!("matrix size p*n overflows: {p} * {n}"))
        })?;
        Ok(DataMatrix {
            p,
            n,
            values: vec![0.0; len],
        })
    }

    /// Build from column-major values; `values.len()` must equal `p * n`.
    pub fn from_vec(p: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got p={p}, n={n}"
            )));
        }
        if values.len() != p * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for a {p}x{n} matrix, got {}",
                p * n,
                values.len()
            )));
        }
        Ok(DataMatrix { p, n, values })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no columns given".into()));
        }
        let p = columns[0].len();
        let mut values = Vec::with_capacity(p * n);
        for (s, col) in columns.iter().enumerate() {
            if col.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "column {s} has length {}, expected {p}",
                    col.len()
                )));
            }
            values.extend_from_slice(col);
        }
        Self::from_vec(p, n, values)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, s: usize) -> f64 {
        debug_assert!(i < self.p && s < self.n);
        self.values[s * self.p + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, s: usize, v: f64) {
        debug_assert!(i < self.p && s < self.n);
        self.values[s * self.p + i] = v;
    }

    /// Contiguous view of sample `s`.
    pub fn column(&self, s: usize) -> &[f64] {
        &self.values[s * self.p..(s + 1) * self.p]
    }

    pub fn column_mut(&mut self, s: usize) -> &mut [f64] {
        &mut self.values[s * self.p..(s + 1) * self.p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    /// New matrix from the given column indices, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<DataMatrix> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("no columns selected".into()));
        }
        let mut values = Vec::with_capacity(self.p * indices.len());
        for &s in indices {
            if s >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "column index {s} out of range for n={}",
                    self.n
                )));
            }
            values.extend_from_slice(self.column(s));
        }
        DataMatrix::from_vec(self.p, indices.len(), values)
    }

    /// Reject NaN/inf entries at API boundaries.
    pub fn ensure_finite(&self) -> Result<()> {
        for (idx, v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "matrix entry (feature {}, sample {})",
                    idx % self.p,
                    idx / self.p
                )));
            }
        }
        Ok(())
    }
}

/// Reject NaN/inf entries in a single signal vector.
pub fn ensure_finite_vec(x: &[f64]) -> Result<()> {
    for (i, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("vector entry {i}")));
        }
    }
    Ok(())
}

/// Population variance over all entries (mean subtracted).
pub fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64
}
