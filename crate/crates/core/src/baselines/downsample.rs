//! Data-independent reduction: partition a lattice into near-cubic
//! contiguous blocks and average inside each block.

use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::grouping::FeatureGroupingOperator;

/// Split an axis of length `d` into `blocks` contiguous runs; the division
/// remainder goes to the first block.
fn axis_boundaries(d: usize, blocks: usize) -> Vec<usize> {
    let base = d / blocks;
    let rem = d % blocks;
    let mut sizes = vec![base; blocks];
    sizes[0] += rem;
    sizes
}

fn block_index(boundaries: &[usize], coord: usize) -> usize {
    let mut acc = 0;
    for (b, &len) in boundaries.iter().enumerate() {
        acc += len;
        if coord < acc {
            return b;
        }
    }
    boundaries.len() - 1
}

/// Block-averaging operator over a lattice. The block grid is chosen so the
/// cluster count is as close to `target_k` as the geometry allows; the
/// realized count is `op.k()` and may differ from `target_k`.
pub fn downsampling_operator(dims: &[usize], target_k: usize) -> Result<FeatureGroupingOperator> {
    if dims.is_empty() || dims.len() > 3 || dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!(
            "invalid lattice dims {dims:?}"
        )));
    }
    let p: usize = dims.iter().product();
    if target_k == 0 || target_k > p {
        return Err(Error::InvalidArgument(format!(
            "target_k = {target_k} out of range [1, {p}]"
        )));
    }

    let nd = dims.len();
    let ratio = (target_k as f64 / p as f64).powf(1.0 / nd as f64);
    let block_counts: Vec<usize> = dims
        .iter()
        .map(|&d| ((d as f64 * ratio).round() as usize).clamp(1, d))
        .collect();
    let boundaries: Vec<Vec<usize>> = dims
        .iter()
        .zip(&block_counts)
        .map(|(&d, &b)| axis_boundaries(d, b))
        .collect();

    // row-major walk, last axis fastest — matches lattice vertex indexing
    let mut labels = Vec::with_capacity(p);
    let mut coord = vec![0usize; nd];
    for _ in 0..p {
        let mut label = 0usize;
        for a in 0..nd {
            label = label * block_counts[a] + block_index(&boundaries[a], coord[a]);
        }
        labels.push(label);
        for a in (0..nd).rev() {
            coord[a] += 1;
            if coord[a] < dims[a] {
                break;
            }
            coord[a] = 0;
        }
    }
    Ok(FeatureGroupingOperator::new(Partition::from_labels(&labels)?))
}
