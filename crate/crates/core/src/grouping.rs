//! The feature-grouping operator and its analysis: reduction, per-cluster
//! averaging, inertia, the exact norm decomposition, pairwise Lipschitz
//! smoothness estimates, and the approximation / denoising bounds.

use crate::error::{Error, Result};
use crate::graph::{self, Partition, StructureGraph, UNREACHABLE};
use crate::matrix::{ensure_finite_vec, DataMatrix};

/// Largest `p` for which the exact all-pairs smoothness constant is computed;
/// above this use [`smoothness_edge_estimate`] / [`smoothness_with_geometry`].
pub const SMOOTHNESS_EXACT_LIMIT: usize = 4096;

/// Relative tolerance of the norm-decomposition identity check.
pub const DECOMPOSITION_REL_TOL: f64 = 1e-10;

/// Linear operator that replaces each cluster of features with its scaled
/// sum: row `q` has value `alpha_q = 1 / sqrt(|C_q|)` on the members of
/// cluster `q` and zero elsewhere. Rows are orthonormal by construction.
#[derive(Debug, Clone)]
pub struct FeatureGroupingOperator {
    partition: Partition,
    alpha: Vec<f64>,
}

impl FeatureGroupingOperator {
    pub fn new(partition: Partition) -> Self {
        let alpha = partition
            .sizes()
            .iter()
            .map(|&s| 1.0 / (s as f64).sqrt())
            .collect();
        FeatureGroupingOperator { partition, alpha }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn p(&self) -> usize {
        self.partition.p()
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    fn check_vec(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} but operator expects p={}",
                x.len(),
                self.p()
            )));
        }
        ensure_finite_vec(x)
    }

    fn check_matrix(&self, x: &DataMatrix) -> Result<()> {
        if x.p() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has p={} but operator expects p={}",
                x.p(),
                self.p()
            )));
        }
        x.ensure_finite()
    }

    /// Reduced signal: `y_q = alpha_q * sum_{j in C_q} x_j`.
    pub fn reduce_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x)?;
        Ok(self.reduce_unchecked(x))
    }

    fn reduce_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k()];
        for (j, &v) in x.iter().enumerate() {
            out[self.partition.cluster_of(j)] += v;
        }
        for (q, v) in out.iter_mut().enumerate() {
            *v *= self.alpha[q];
        }
        out
    }

    /// Column-wise reduction of a data matrix to `k x n`.
    pub fn reduce(&self, x: &DataMatrix) -> Result<DataMatrix> {
        self.check_matrix(x)?;
        let mut out = DataMatrix::zeros(self.k(), x.n())?;
        for s in 0..x.n() {
            let reduced = self.reduce_unchecked(x.column(s));
            out.column_mut(s).copy_from_slice(&reduced);
        }
        Ok(out)
    }

    /// Projection onto the operator's row space: every feature is replaced
    /// by its cluster mean. Idempotent and self-adjoint.
    pub fn approximate_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x)?;
        Ok(self.approximate_unchecked(x))
    }

    fn approximate_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let reduced = self.reduce_unchecked(x);
        x.iter()
            .enumerate()
            .map(|(j, _)| {
                let q = self.partition.cluster_of(j);
                self.alpha[q] * reduced[q]
            })
            .collect()
    }

    pub fn approximate(&self, x: &DataMatrix) -> Result<DataMatrix> {
        self.check_matrix(x)?;
        let mut out = DataMatrix::zeros(x.p(), x.n())?;
        for s in 0..x.n() {
            let approx = self.approximate_unchecked(x.column(s));
            out.column_mut(s).copy_from_slice(&approx);
        }
        Ok(out)
    }
}

/// Within-cluster squared deviation from cluster means: total and the
/// per-cluster terms.
pub fn inertia(op: &FeatureGroupingOperator, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    op.check_vec(x)?;
    let part = op.partition();
    let mut sums = vec![0.0; op.k()];
    for (j, &v) in x.iter().enumerate() {
        sums[part.cluster_of(j)] += v;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(part.sizes())
        .map(|(&s, &c)| s / c as f64)
        .collect();
    let mut per_cluster = vec![0.0; op.k()];
    for (j, &v) in x.iter().enumerate() {
        let q = part.cluster_of(j);
        let d = v - means[q];
        per_cluster[q] += d * d;
    }
    let total = per_cluster.iter().sum();
    Ok((total, per_cluster))
}

/// Split `||x||^2` into the reduced norm and the inertia; the two terms are
/// an orthogonal decomposition and must sum back to `||x||^2` within
/// [`DECOMPOSITION_REL_TOL`] (asserted).
pub fn norm_decomposition(op: &FeatureGroupingOperator, x: &[f64]) -> Result<(f64, f64)> {
    op.check_vec(x)?;
    let reduced = op.reduce_unchecked(x);
    let reduced_norm_sq: f64 = reduced.iter().map(|v| v * v).sum();
    let (inertia_total, _) = inertia(op, x)?;
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    let gap = (norm_sq - reduced_norm_sq - inertia_total).abs();
    assert!(
        gap <= DECOMPOSITION_REL_TOL * norm_sq.max(f64::MIN_POSITIVE),
        "norm decomposition violated: ||x||^2 = {norm_sq}, reduced = {reduced_norm_sq}, inertia = {inertia_total}"
    );
    Ok((reduced_norm_sq, inertia_total))
}

/// Pairwise Lipschitz constants of a signal over a graph with unit edge
/// lengths: the global constant, and per-cluster constants when a partition
/// was supplied.
#[derive(Debug, Clone)]
pub struct SmoothnessEstimate {
    pub global: f64,
    pub per_cluster: Option<Vec<f64>>,
}

fn check_signal_graph(x: &[f64], g: &StructureGraph) -> Result<()> {
    if x.len() != g.p() {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} but graph has p={}",
            x.len(),
            g.p()
        )));
    }
    ensure_finite_vec(x)
}

/// Exact smoothness constant: max over connected vertex pairs of
/// `|x_i - x_j| / dist(v_i, v_j)`. Costs one BFS per vertex, so it is
/// guarded to `p <= SMOOTHNESS_EXACT_LIMIT`.
pub fn smoothness_constant(
    x: &[f64],
    g: &StructureGraph,
    partition: Option<&Partition>,
) -> Result<SmoothnessEstimate> {
    check_signal_graph(x, g)?;
    if g.p() > SMOOTHNESS_EXACT_LIMIT {
        return Err(Error::GuardExceeded {
            operation: "exact smoothness constant",
            p: g.p(),
            limit: SMOOTHNESS_EXACT_LIMIT,
        });
    }
    if let Some(part) = partition {
        if part.p() != g.p() {
            return Err(Error::DimensionMismatch(format!(
                "partition has p={} but graph has p={}",
                part.p(),
                g.p()
            )));
        }
    }
    let mut global = 0.0f64;
    let mut per_cluster = partition.map(|part| vec![0.0f64; part.k()]);
    for src in 0..g.p() {
        let dist = graph::bfs_distances(g, src)?;
        for j in src + 1..g.p() {
            let d = dist[j];
            if d == UNREACHABLE || d == 0 {
                continue;
            }
            let ratio = (x[src] - x[j]).abs() / d as f64;
            global = global.max(ratio);
            if let (Some(per), Some(part)) = (per_cluster.as_mut(), partition) {
                let q = part.cluster_of(src);
                if q == part.cluster_of(j) {
                    per[q] = per[q].max(ratio);
                }
            }
        }
    }
    Ok(SmoothnessEstimate { global, per_cluster })
}

/// Edge-restricted smoothness estimate: max over structural edges of
/// `|x_i - x_j|`. A lower bound of the pairwise constant by construction;
/// on unit-length edges a shortest-path telescoping argument makes it attain
/// the global constant exactly, which is what makes it usable at any `p`.
pub fn smoothness_edge_estimate(x: &[f64], g: &StructureGraph) -> Result<f64> {
    check_signal_graph(x, g)?;
    let mut best = 0.0f64;
    for &(i, j) in g.edges() {
        best = best.max((x[i] - x[j]).abs());
    }
    Ok(best)
}

/// Precomputed per-cluster geodesic data for one (graph, partition) pair:
/// member lists, within-cluster pair distances, and diameters. Building it
/// costs one truncated BFS per feature; reuse it to evaluate many signals
/// against the same partition.
#[derive(Debug, Clone)]
pub struct PartitionGeometry {
    members: Vec<Vec<usize>>,
    /// Per cluster: `(local_a, local_b, dist)` for connected member pairs.
    pairs: Vec<Vec<(u32, u32, u32)>>,
    diameters: Vec<u32>,
}

impl PartitionGeometry {
    pub fn new(g: &StructureGraph, partition: &Partition) -> Result<Self> {
        if partition.p() != g.p() {
            return Err(Error::DimensionMismatch(format!(
                "partition has p={} but graph has p={}",
                partition.p(),
                g.p()
            )));
        }
        let members = partition.members();
        let mut pairs = Vec::with_capacity(members.len());
        let mut diameters = Vec::with_capacity(members.len());
        for list in &members {
            let mut cluster_pairs = Vec::new();
            let mut diam = 0u32;
            for (a, &v) in list.iter().enumerate() {
                if a + 1 == list.len() {
                    break;
                }
                let rest = &list[a + 1..];
                let dists = graph::bfs_to_targets(g, v, rest);
                for (off, &d) in dists.iter().enumerate() {
                    if d == UNREACHABLE {
                        diam = UNREACHABLE;
                        continue;
                    }
                    if diam != UNREACHABLE {
                        diam = diam.max(d);
                    }
                    cluster_pairs.push((a as u32, (a + 1 + off) as u32, d));
                }
            }
            pairs.push(cluster_pairs);
            diameters.push(diam);
        }
        Ok(PartitionGeometry {
            members,
            pairs,
            diameters,
        })
    }

    pub fn diameters(&self) -> &[u32] {
        &self.diameters
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// `sum_q |C_q| * diam(C_q)^2` as f64 (infinite if any cluster spans
    /// disconnected components).
    pub fn size_weighted_diam_sq(&self) -> f64 {
        let mut total = 0.0f64;
        for (list, &d) in self.members.iter().zip(&self.diameters) {
            if d == UNREACHABLE {
                return f64::INFINITY;
            }
            total += list.len() as f64 * (d as f64) * (d as f64);
        }
        total
    }
}

/// Smoothness estimate usable at any `p`: the global constant from the edge
/// scan, per-cluster constants from precomputed within-cluster distances.
pub fn smoothness_with_geometry(
    x: &[f64],
    g: &StructureGraph,
    geom: &PartitionGeometry,
) -> Result<SmoothnessEstimate> {
    check_signal_graph(x, g)?;
    let global = smoothness_edge_estimate(x, g)?;
    let mut per = Vec::with_capacity(geom.members.len());
    for (list, cluster_pairs) in geom.members.iter().zip(&geom.pairs) {
        let mut lq = 0.0f64;
        for &(a, b, d) in cluster_pairs {
            let xi = x[list[a as usize]];
            let xj = x[list[b as usize]];
            lq = lq.max((xi - xj).abs() / d as f64);
        }
        per.push(lq);
    }
    Ok(SmoothnessEstimate {
        global,
        per_cluster: Some(per),
    })
}

/// Lower bounds on the reduced norm together with the exact quantities they
/// bound. All three `lower_*` fields are valid lower bounds of
/// `reduced_norm_sq` (possibly vacuous, i.e. negative).
#[derive(Debug, Clone)]
pub struct ApproximationBounds {
    pub reduced_norm_sq: f64,
    pub inertia_total: f64,
    pub inertia_per_cluster: Vec<f64>,
    /// `||x||^2 - L^2 * sum_q |C_q| diam(C_q)^2` with the global constant.
    pub lower_global: f64,
    /// Same with per-cluster constants `L_q`; never below `lower_global`.
    pub lower_local: f64,
    /// `||x||^2 - sum_q |C_q| * range_q^2` where `range_q` is the value
    /// spread inside cluster `q`; the tightest of the three.
    pub lower_range: f64,
}

/// Multiply guarding `0 * inf = 0`, which arises for constant signals on
/// partitions with unbounded diameters.
fn bound_term(coeff_sq: f64, weighted: f64) -> f64 {
    if coeff_sq == 0.0 || weighted == 0.0 {
        0.0
    } else {
        coeff_sq * weighted
    }
}

/// Evaluate the smoothness-based lower bounds for one signal, reusing a
/// [`PartitionGeometry`]. The estimate must carry per-cluster constants for
/// the same partition.
pub fn bounds_with_geometry(
    op: &FeatureGroupingOperator,
    x: &[f64],
    est: &SmoothnessEstimate,
    geom: &PartitionGeometry,
) -> Result<ApproximationBounds> {
    op.check_vec(x)?;
    let per = est.per_cluster.as_ref().ok_or_else(|| {
        Error::InvalidArgument("smoothness estimate lacks per-cluster constants".into())
    })?;
    if per.len() != op.k() || geom.members.len() != op.k() {
        return Err(Error::DimensionMismatch(format!(
            "estimate/geometry cluster count does not match operator k={}",
            op.k()
        )));
    }

    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    let reduced = op.reduce_unchecked(x);
    let reduced_norm_sq: f64 = reduced.iter().map(|v| v * v).sum();
    let (inertia_total, inertia_per_cluster) = inertia(op, x)?;

    let mut weighted_global = 0.0f64;
    let mut local_sum = 0.0f64;
    let mut range_sum = 0.0f64;
    for (q, list) in geom.members.iter().enumerate() {
        let size = list.len() as f64;
        let diam = geom.diameters[q];
        let diam_sq = if diam == UNREACHABLE {
            f64::INFINITY
        } else {
            (diam as f64) * (diam as f64)
        };
        weighted_global += bound_term(1.0, size * diam_sq);
        local_sum += bound_term(per[q] * per[q], size * diam_sq);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in list {
            lo = lo.min(x[v]);
            hi = hi.max(x[v]);
        }
        let range = hi - lo;
        range_sum += size * range * range;
    }

    let lower_global = norm_sq - bound_term(est.global * est.global, weighted_global);
    let lower_local = norm_sq - local_sum;
    let lower_range = norm_sq - range_sum;

    // Provable ordering; allow fp slack proportional to the norm.
    let tol = 1e-9 * norm_sq.max(1.0);
    assert!(
        lower_global <= lower_local + tol,
        "bound chain violated: global {lower_global} > local {lower_local}"
    );
    assert!(
        lower_local <= lower_range + tol,
        "bound chain violated: local {lower_local} > range {lower_range}"
    );
    assert!(
        lower_range <= reduced_norm_sq + tol,
        "bound chain violated: range {lower_range} > reduced norm {reduced_norm_sq}"
    );
    assert!(
        reduced_norm_sq <= norm_sq + tol,
        "contraction violated: reduced {reduced_norm_sq} > norm {norm_sq}"
    );

    Ok(ApproximationBounds {
        reduced_norm_sq,
        inertia_total,
        inertia_per_cluster,
        lower_global,
        lower_local,
        lower_range,
    })
}

/// One-shot variant of [`bounds_with_geometry`] that computes the geometry
/// internally.
pub fn approximation_bounds(
    op: &FeatureGroupingOperator,
    x: &[f64],
    g: &StructureGraph,
    est: &SmoothnessEstimate,
) -> Result<ApproximationBounds> {
    let geom = PartitionGeometry::new(g, op.partition())?;
    bounds_with_geometry(op, x, est, &geom)
}

/// Worst-case mean squared error of the cluster-mean approximation under
/// i.i.d. Gaussian noise, and the smoothness level below which grouping
/// denoises.
#[derive(Debug, Clone, Copy)]
pub struct MseBound {
    /// `L^2 * sum_q |C_q| diam(C_q)^2 + k * sigma^2`.
    pub upper_bound: f64,
    /// Values of `L^2` at or below `(p - k) sigma^2 / sum_q |C_q| diam^2`
    /// guarantee `upper_bound <= p * sigma^2`. Infinite when all diameters
    /// are zero (k = p).
    pub denoising_threshold_lsq: f64,
}

pub fn mse_bound(
    partition: &Partition,
    g: &StructureGraph,
    lipschitz: f64,
    sigma: f64,
) -> Result<MseBound> {
    if partition.p() != g.p() {
        return Err(Error::DimensionMismatch(format!(
            "partition has p={} but graph has p={}",
            partition.p(),
            g.p()
        )));
    }
    if !(sigma >= 0.0) || !(lipschitz >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma and L must be nonnegative, got sigma={sigma}, L={lipschitz}"
        )));
    }
    let geom = PartitionGeometry::new(g, partition)?;
    let weighted = geom.size_weighted_diam_sq();
    let p = partition.p() as f64;
    let k = partition.k() as f64;
    let upper_bound = bound_term(lipschitz * lipschitz, weighted) + k * sigma * sigma;
    let denoising_threshold_lsq = if weighted == 0.0 {
        f64::INFINITY
    } else {
        (p - k) * sigma * sigma / weighted
    };
    Ok(MseBound {
        upper_bound,
        denoising_threshold_lsq,
    })
}

/// Cluster count balancing the bias and variance terms of the equal-sized
/// cluster bound: `k = round(p^{2/3})`, clamped to `[1, p]`.
pub fn balanced_k_heuristic(p: usize) -> usize {
    if p == 0 {
        return 0;
    }
    let k = (p as f64).powf(2.0 / 3.0).round() as usize;
    k.clamp(1, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_lattice_graph;

    fn two_pair_op() -> FeatureGroupingOperator {
        FeatureGroupingOperator::new(Partition::new(vec![0, 0, 1, 1], 2).unwrap())
    }

    #[test]
    fn alpha_from_sizes() {
        let op = two_pair_op();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert!((op.alpha()[0] - inv_sqrt2).abs() < 1e-15);
        assert!((op.alpha()[1] - inv_sqrt2).abs() < 1e-15);
    }

    #[test]
    fn singleton_partition_is_identity() {
        let op = FeatureGroupingOperator::new(Partition::singletons(4).unwrap());
        let x = [1.0, -2.0, 3.5, 0.25];
        assert_eq!(op.reduce_vec(&x).unwrap(), x.to_vec());
        assert_eq!(op.approximate_vec(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn single_cluster_reduces_to_scaled_mean() {
        let op = FeatureGroupingOperator::new(Partition::single_cluster(9).unwrap());
        assert!((op.alpha()[0] - 1.0 / 3.0).abs() < 1e-15);
        let x = vec![2.0; 9];
        let reduced = op.reduce_vec(&x).unwrap();
        // |mean| * sqrt(p) = 2 * 3
        assert!((reduced[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_hand_example() {
        let op =
            FeatureGroupingOperator::new(Partition::new(vec![0, 0, 1], 2).unwrap());
        let out = op.reduce_vec(&[2.0, 2.0, 4.0]).unwrap();
        assert!((out[0] - 4.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((out[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn approximate_is_cluster_mean_and_idempotent() {
        let op = FeatureGroupingOperator::new(Partition::single_cluster(2).unwrap());
        let a = op.approximate_vec(&[0.0, 2.0]).unwrap();
        for v in &a {
            assert!((v - 1.0).abs() < 1e-12);
        }

        let op = two_pair_op();
        let x = [0.3, -1.7, 2.2, 9.0];
        let once = op.approximate_vec(&x).unwrap();
        let twice = op.approximate_vec(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_dimension_mismatch_and_non_finite() {
        let op = two_pair_op();
        assert!(op.reduce_vec(&[1.0, 2.0]).is_err());
        assert!(op.reduce_vec(&[1.0, 2.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn inertia_examples() {
        let op = FeatureGroupingOperator::new(Partition::single_cluster(2).unwrap());
        let (total, per) = inertia(&op, &[0.0, 2.0]).unwrap();
        assert!((total - 2.0).abs() < 1e-12);
        assert_eq!(per.len(), 1);

        let op = two_pair_op();
        let (total, _) = inertia(&op, &[3.0, 3.0, 3.0, 3.0]).unwrap();
        assert_eq!(total, 0.0);
    }

    #[test]
    fn inertia_matches_approximation_residual() {
        let op = FeatureGroupingOperator::new(Partition::new(vec![0, 1, 0, 2, 1], 3).unwrap());
        let x = [0.5, -2.0, 4.0, 1.0, 0.0];
        let (total, _) = inertia(&op, &x).unwrap();
        let approx = op.approximate_vec(&x).unwrap();
        let residual: f64 = x
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        assert!((total - residual).abs() < 1e-12);
    }

    #[test]
    fn norm_decomposition_edge_cases() {
        let op = two_pair_op();
        let (r, m) = norm_decomposition(&op, &[0.0; 4]).unwrap();
        assert_eq!((r, m), (0.0, 0.0));

        let id = FeatureGroupingOperator::new(Partition::singletons(3).unwrap());
        let (r, m) = norm_decomposition(&id, &[1.0, 2.0, 2.0]).unwrap();
        assert!((r - 9.0).abs() < 1e-12);
        assert_eq!(m, 0.0);
    }

    #[test]
    fn smoothness_chain_examples() {
        let g = build_lattice_graph(&[3]).unwrap();
        let est = smoothness_constant(&[0.0, 1.0, 2.0], &g, None).unwrap();
        assert!((est.global - 1.0).abs() < 1e-15);

        let est = smoothness_constant(&[5.0, 5.0, 5.0], &g, None).unwrap();
        assert_eq!(est.global, 0.0);

        // pairs: |0-3|/1 = 3, |3-4|/1 = 1, |0-4|/2 = 2
        let est = smoothness_constant(&[0.0, 3.0, 4.0], &g, None).unwrap();
        assert!((est.global - 3.0).abs() < 1e-15);
        assert_eq!(
            smoothness_edge_estimate(&[0.0, 3.0, 4.0], &g).unwrap(),
            est.global
        );
    }

    #[test]
    fn smoothness_per_cluster() {
        let g = build_lattice_graph(&[4]).unwrap();
        let part = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let x = [0.0, 10.0, 10.0, 11.0];
        let est = smoothness_constant(&x, &g, Some(&part)).unwrap();
        let per = est.per_cluster.unwrap();
        assert!((per[0] - 10.0).abs() < 1e-15);
        assert!((per[1] - 1.0).abs() < 1e-15);
        assert!(est.global >= per[0].max(per[1]));
    }

    #[test]
    fn bounds_on_singletons_are_tight() {
        let g = build_lattice_graph(&[6]).unwrap();
        let part = Partition::singletons(6).unwrap();
        let op = FeatureGroupingOperator::new(part.clone());
        let x = [0.4, -1.0, 2.0, 3.0, -0.5, 0.0];
        let est = smoothness_constant(&x, &g, Some(&part)).unwrap();
        let b = approximation_bounds(&op, &x, &g, &est).unwrap();
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        assert!((b.lower_global - norm_sq).abs() < 1e-12);
        assert!((b.reduced_norm_sq - norm_sq).abs() < 1e-12);
        assert_eq!(b.inertia_total, 0.0);
    }

    #[test]
    fn bounds_constant_signal() {
        let g = build_lattice_graph(&[2, 3]).unwrap();
        let part = Partition::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let op = FeatureGroupingOperator::new(part.clone());
        let x = [7.0; 6];
        let est = smoothness_constant(&x, &g, Some(&part)).unwrap();
        assert_eq!(est.global, 0.0);
        let b = approximation_bounds(&op, &x, &g, &est).unwrap();
        let norm_sq = 6.0 * 49.0;
        assert!((b.lower_global - norm_sq).abs() < 1e-9);
        assert!((b.reduced_norm_sq - norm_sq).abs() < 1e-9);
    }

    #[test]
    fn mse_bound_edge_cases() {
        let g = build_lattice_graph(&[4]).unwrap();
        let singles = Partition::singletons(4).unwrap();
        let b = mse_bound(&singles, &g, 1.0, 2.0).unwrap();
        // k = p: bound = p sigma^2, threshold infinite
        assert!((b.upper_bound - 16.0).abs() < 1e-12);
        assert!(b.denoising_threshold_lsq.is_infinite());

        let halves = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let b = mse_bound(&halves, &g, 0.0, 2.0).unwrap();
        assert!((b.upper_bound - 8.0).abs() < 1e-12);
        assert!(mse_bound(&halves, &g, -1.0, 1.0).is_err());
    }

    #[test]
    fn balanced_k_values() {
        assert_eq!(balanced_k_heuristic(1), 1);
        assert_eq!(balanced_k_heuristic(1000), 100);
        // direct evaluation: 140398^(2/3) = 2701.307..., rounds down
        assert_eq!(balanced_k_heuristic(140_398), 2701);
    }
}
