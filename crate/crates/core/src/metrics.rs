//! Evaluation measures: the relative-distortion protocol, percolation
//! statistics, and empirical MSE.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::ReducerModel;
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::matrix::DataMatrix;

/// Relative distortion is capped here so exact matches stay finite.
pub const RD_CAP_DB: f64 = 300.0;

/// Result of one run of [`distortion_protocol`].
#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    /// Least-squares scale relating reduced noisy distances to clean ones.
    pub eta: f64,
    /// Relative distortion in dB; higher is better.
    pub rd_db: f64,
    /// Number of test-half sample pairs.
    pub n_pairs: usize,
}

/// Cluster-size summary of a partition.
#[derive(Debug, Clone, Serialize)]
pub struct PercolationReport {
    pub k: usize,
    pub largest_cluster_size: usize,
    pub largest_fraction: f64,
    /// Cluster sizes, descending; sums to `p`.
    pub size_histogram: Vec<usize>,
}

/// Euclidean distances over unordered column pairs, `(i, j)` with `i < j` in
/// lexicographic order.
pub fn pairwise_distance_vector(x: &DataMatrix) -> Result<Vec<f64>> {
    if x.n() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got n={}",
            x.n()
        )));
    }
    let n = x.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let a = x.column(i);
        for j in i + 1..n {
            let b = x.column(j);
            let d: f64 = a
                .iter()
                .zip(b)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt();
            out.push(d);
        }
    }
    Ok(out)
}

/// Least-squares proportionality constant `eta` minimizing
/// `||eta * reduced - original||^2`.
pub fn fit_eta(reduced: &[f64], original: &[f64]) -> Result<f64> {
    if reduced.len() != original.len() || reduced.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "distance vectors of length {} and {}",
            reduced.len(),
            original.len()
        )));
    }
    let denom: f64 = reduced.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(Error::DegenerateFit(
            "all reduced distances are zero; eta is undefined".into(),
        ));
    }
    let num: f64 = reduced.iter().zip(original).map(|(u, v)| u * v).sum();
    Ok(num / denom)
}

/// Relative distortion in dB:
/// `-10 log10(||noisy_scaled - original||^2 / ||original||^2)`, capped at
/// [`RD_CAP_DB`] for exact matches.
pub fn relative_distortion(original: &[f64], noisy_scaled: &[f64]) -> Result<f64> {
    if original.len() != noisy_scaled.len() || original.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "distance vectors of length {} and {}",
            original.len(),
            noisy_scaled.len()
        )));
    }
    let orig_sq: f64 = original.iter().map(|v| v * v).sum();
    if orig_sq == 0.0 {
        return Err(Error::DegenerateFit(
            "original distances have zero norm".into(),
        ));
    }
    let err_sq: f64 = original
        .iter()
        .zip(noisy_scaled)
        .map(|(u, v)| (u - v) * (u - v))
        .sum();
    if err_sq == 0.0 {
        return Ok(RD_CAP_DB);
    }
    Ok((-10.0 * (err_sq / orig_sq).log10()).min(RD_CAP_DB))
}

/// Deterministic half split: `test` gets `floor(n/2)` shuffled indices,
/// `train` the rest; both returned ascending.
pub fn train_test_split(n: usize, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    indices.shuffle(&mut rng);
    let m_test = n / 2;
    let mut test: Vec<usize> = indices[..m_test].to_vec();
    let mut train: Vec<usize> = indices[m_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

/// Fit a reducer on the noisy training half, then score how well scaled
/// pairwise distances of the reduced noisy test half match the clean test
/// distances. The clean training half is never touched.
pub fn distortion_protocol<F>(
    clean: &DataMatrix,
    noisy: &DataMatrix,
    fit: F,
    split_seed: u64,
) -> Result<DistortionReport>
where
    F: FnOnce(&DataMatrix) -> Result<ReducerModel>,
{
    if clean.p() != noisy.p() || clean.n() != noisy.n() {
        return Err(Error::DimensionMismatch(format!(
            "clean is {}x{} but noisy is {}x{}",
            clean.p(),
            clean.n(),
            noisy.p(),
            noisy.n()
        )));
    }
    if clean.n() < 4 {
        return Err(Error::InvalidArgument(format!(
            "protocol needs n >= 4 samples, got {}",
            clean.n()
        )));
    }
    let (train, test) = train_test_split(clean.n(), split_seed);
    let x_train = noisy.select_columns(&train)?;
    let model = fit(&x_train)?;

    let x_test = noisy.select_columns(&test)?;
    let s_test = clean.select_columns(&test)?;
    let reduced = model.reduce(&x_test)?;
    let delta_reduced = pairwise_distance_vector(&reduced)?;
    let delta_orig = pairwise_distance_vector(&s_test)?;

    let eta = fit_eta(&delta_reduced, &delta_orig)?;
    let scaled: Vec<f64> = delta_reduced.iter().map(|d| eta * d).collect();
    let rd_db = relative_distortion(&delta_orig, &scaled)?;
    Ok(DistortionReport {
        eta,
        rd_db,
        n_pairs: delta_orig.len(),
    })
}

/// Size-of-largest-cluster statistics; relabeling-invariant.
pub fn percolation_stats(partition: &Partition) -> PercolationReport {
    let mut sizes: Vec<usize> = partition.sizes().to_vec();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let largest = sizes[0];
    PercolationReport {
        k: partition.k(),
        largest_cluster_size: largest,
        largest_fraction: largest as f64 / partition.p() as f64,
        size_histogram: sizes,
    }
}

/// Mean per-sample squared error `||S - approx||_F^2 / n`.
pub fn mse_empirical(reference: &DataMatrix, approx: &DataMatrix) -> Result<f64> {
    if reference.p() != approx.p() || reference.n() != approx.n() {
        return Err(Error::DimensionMismatch(format!(
            "reference is {}x{} but approx is {}x{}",
            reference.p(),
            reference.n(),
            approx.p(),
            approx.n()
        )));
    }
    let total: f64 = reference
        .values()
        .iter()
        .zip(approx.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(total / reference.n() as f64)
}
