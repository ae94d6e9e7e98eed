//! Connectivity-constrained agglomerative baselines: single linkage via the
//! minimum spanning forest, and Ward's variance-minimizing linkage.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{
    connected_components, minimum_spanning_tree, Partition, StructureGraph, UnionFind,
};
use crate::matrix::DataMatrix;
use crate::rena::similarity_graph;

/// Ward refuses above this feature count; its cost is super-linear in `p`.
pub const WARD_FEATURE_LIMIT: usize = 20_000;

fn check_clustering_args(
    x: &DataMatrix,
    g: &StructureGraph,
    k: usize,
) -> Result<usize> {
    if x.p() != g.p() {
        return Err(Error::DimensionMismatch(format!(
            "data has p={} but graph has p={}",
            x.p(),
            g.p()
        )));
    }
    if k == 0 || k > g.p() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} out of range [1, {}]",
            g.p()
        )));
    }
    let components = connected_components(g).k();
    if components > k {
        return Err(Error::Infeasible { components, k });
    }
    Ok(components)
}

/// Single-linkage feature clustering: build the minimum spanning forest of
/// the similarity graph and cut its heaviest edges until `k` components
/// remain.
pub fn single_linkage(x: &DataMatrix, g: &StructureGraph, k: usize) -> Result<Partition> {
    let components = check_clustering_args(x, g, k)?;
    let p = g.p();
    if k == p {
        return Partition::singletons(p);
    }
    let wg = similarity_graph(x, g)?;
    let mut forest = minimum_spanning_tree(&wg);
    // ascend by (weight, i, j); the cut drops the top k - components edges
    forest.sort_unstable_by(|a, b| {
        a.2.total_cmp(&b.2)
            .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
    });
    let keep = forest.len() - (k - components);
    let mut uf = UnionFind::new(p);
    for &(i, j, _) in &forest[..keep] {
        uf.union(i, j);
    }
    let labels: Vec<usize> = (0..p).map(|v| uf.find(v)).collect();
    Partition::from_labels(&labels)
}

/// Heap candidate for Ward merges: ordered by cost, then by the id pair so
/// that equal-cost merges pick the lowest-index pair.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    cost: f64,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| (self.a, self.b).cmp(&(other.a, other.b)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Variance increase caused by merging two clusters with the given sizes and
/// centroids.
fn ward_cost(size_a: f64, centroid_a: &[f64], size_b: f64, centroid_b: &[f64]) -> f64 {
    let mut dist_sq = 0.0;
    for (u, v) in centroid_a.iter().zip(centroid_b) {
        let d = u - v;
        dist_sq += d * d;
    }
    size_a * size_b / (size_a + size_b) * dist_sq
}

/// Ward's linkage with a connectivity constraint: repeatedly merge the
/// connected pair of clusters whose merge increases total inertia the least,
/// until `k` clusters remain. Candidates live in a lazy-invalidation heap;
/// merged clusters get fresh ids, so stale entries are detected by a dead
/// endpoint.
pub fn ward_linkage(x: &DataMatrix, g: &StructureGraph, k: usize) -> Result<Partition> {
    let p = g.p();
    if p > WARD_FEATURE_LIMIT {
        return Err(Error::GuardExceeded {
            operation: "ward linkage",
            p,
            limit: WARD_FEATURE_LIMIT,
        });
    }
    check_clustering_args(x, g, k)?;
    x.ensure_finite()?;
    if k == p {
        return Partition::singletons(p);
    }

    let n = x.n();
    let max_clusters = 2 * p; // p initial ids plus at most p - 1 merges
    let mut alive = vec![false; max_clusters];
    let mut size = vec![0usize; max_clusters];
    let mut centroid: Vec<Vec<f64>> = vec![Vec::new(); max_clusters];
    let mut neighbors: Vec<HashSet<usize>> = vec![HashSet::new(); max_clusters];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); max_clusters];

    for v in 0..p {
        alive[v] = true;
        size[v] = 1;
        centroid[v] = (0..n).map(|s| x.get(v, s)).collect();
        members[v] = vec![v];
    }
    for &(i, j) in g.edges() {
        neighbors[i].insert(j);
        neighbors[j].insert(i);
    }

    let mut heap: BinaryHeap<std::cmp::Reverse<Candidate>> = BinaryHeap::new();
    for &(i, j) in g.edges() {
        heap.push(std::cmp::Reverse(Candidate {
            cost: ward_cost(1.0, &centroid[i], 1.0, &centroid[j]),
            a: i,
            b: j,
        }));
    }

    let mut count = p;
    let mut next_id = p;
    while count > k {
        let Some(std::cmp::Reverse(cand)) = heap.pop() else {
            unreachable!("feasibility check guarantees enough connected pairs");
        };
        if !alive[cand.a] || !alive[cand.b] {
            continue;
        }
        let (a, b) = (cand.a, cand.b);
        let m = next_id;
        next_id += 1;
        alive[a] = false;
        alive[b] = false;
        alive[m] = true;

        let (sa, sb) = (size[a] as f64, size[b] as f64);
        size[m] = size[a] + size[b];
        centroid[m] = centroid[a]
            .iter()
            .zip(&centroid[b])
            .map(|(u, v)| (sa * u + sb * v) / (sa + sb))
            .collect();
        let mut mem = std::mem::take(&mut members[a]);
        mem.append(&mut members[b]);
        members[m] = mem;

        let mut merged: HashSet<usize> = std::mem::take(&mut neighbors[a]);
        merged.extend(std::mem::take(&mut neighbors[b]));
        merged.remove(&a);
        merged.remove(&b);
        for &c in &merged {
            neighbors[c].remove(&a);
            neighbors[c].remove(&b);
            neighbors[c].insert(m);
            heap.push(std::cmp::Reverse(Candidate {
                cost: ward_cost(size[m] as f64, &centroid[m], size[c] as f64, &centroid[c]),
                a: m.min(c),
                b: m.max(c),
            }));
        }
        neighbors[m] = merged;
        count -= 1;
    }

    let mut labels = vec![0usize; p];
    for (id, is_alive) in alive.iter().enumerate() {
        if *is_alive {
            for &v in &members[id] {
                labels[v] = id;
            }
        }
    }
    Partition::from_labels(&labels)
}
