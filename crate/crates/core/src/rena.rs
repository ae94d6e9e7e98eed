//! Recursive nearest-neighbor agglomeration.
//!
//! Each round builds a similarity-weighted graph on the current vertices
//! (squared Euclidean distance between feature rows, restricted to
//! structural edges), links every vertex to its cheapest neighbor, merges
//! the connected components of the symmetrized 1-NN subgraph, and reduces
//! both the data and the structure. When a round would overshoot below `k`
//! components, it is re-run with the 1-NN edges pruned greedily (cheapest
//! first) so that exactly `k` components remain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    connected_components, Partition, StructureGraph, UnionFind, WeightedGraph,
};
use crate::matrix::DataMatrix;

/// Per-run diagnostics of [`rena`].
#[derive(Debug, Clone, Serialize)]
pub struct RenaTrace {
    /// Number of merge rounds executed (a pruned re-run counts as the same
    /// round).
    pub iterations: usize,
    /// Vertex count after each round; strictly decreasing.
    pub cluster_counts: Vec<usize>,
    /// 1-NN edges discarded by the final pruning round.
    pub pruned_edges: usize,
}

/// Per-edge squared Euclidean row distances, aligned with `g.edges()`.
/// Callers have already validated dimensions and finiteness.
fn edge_weights(x: &DataMatrix, g: &StructureGraph) -> Vec<f64> {
    // sample-outer accumulation keeps both the column and the weight vector
    // in cache; lattice edges touch nearby column entries
    let mut weights = vec![0.0f64; g.edge_count()];
    for s in 0..x.n() {
        let col = x.column(s);
        for (w, &(i, j)) in weights.iter_mut().zip(g.edges()) {
            let d = col[i] - col[j];
            *w += d * d;
        }
    }
    weights
}

fn check_data_graph(x: &DataMatrix, g: &StructureGraph) -> Result<()> {
    if x.p() != g.p() {
        return Err(Error::DimensionMismatch(format!(
            "data has p={} but graph has p={}",
            x.p(),
            g.p()
        )));
    }
    x.ensure_finite()
}

/// Weight every structural edge with the squared Euclidean distance between
/// the two feature rows. Non-edges carry no weight.
pub fn similarity_graph(x: &DataMatrix, g: &StructureGraph) -> Result<WeightedGraph> {
    check_data_graph(x, g)?;
    let weights = edge_weights(x, g);
    WeightedGraph::new(g.clone(), weights)
}

/// 1-NN edge list on `(g, weights)`: each vertex linked to its cheapest
/// neighbor, symmetrized; sorted and deduplicated.
fn one_nn_edges(g: &StructureGraph, weights: &[f64]) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(g.p());
    for v in 0..g.p() {
        let mut best: Option<(f64, usize)> = None;
        for (nbr, eid) in g.neighbor_entries(v) {
            let w = weights[eid];
            // strict < keeps the first (= lowest-index) neighbor on ties
            if best.map_or(true, |(bw, _)| w < bw) {
                best = Some((w, nbr));
            }
        }
        if let Some((_, nbr)) = best {
            edges.push((v.min(nbr), v.max(nbr)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Symmetrized 1-nearest-neighbor subgraph: each vertex points to its
/// minimum-weight structural neighbor (ties broken by lowest neighbor
/// index), then direction is dropped. Isolated vertices contribute no edge.
pub fn one_nn_subgraph(wg: &WeightedGraph) -> StructureGraph {
    let edges = one_nn_edges(wg.graph(), wg.weights());
    StructureGraph::from_edges(wg.graph().p(), edges).expect("1-NN edges come from a valid graph")
}

/// Collapse the structure graph along an assignment: clusters are adjacent
/// iff some original edge joins their members; self-loops are dropped.
pub fn reduce_structure(assign: &Partition, g: &StructureGraph) -> Result<StructureGraph> {
    if assign.p() != g.p() {
        return Err(Error::DimensionMismatch(format!(
            "assignment covers p={} but graph has p={}",
            assign.p(),
            g.p()
        )));
    }
    let mut edges = Vec::with_capacity(g.edge_count());
    for &(i, j) in g.edges() {
        let (a, b) = (assign.cluster_of(i), assign.cluster_of(j));
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    StructureGraph::from_edges(assign.k(), edges)
}

/// Collapse the data matrix along an assignment: each new row is the mean of
/// its member rows.
pub fn reduce_data(assign: &Partition, x: &DataMatrix) -> Result<DataMatrix> {
    if assign.p() != x.p() {
        return Err(Error::DimensionMismatch(format!(
            "assignment covers p={} but data has p={}",
            assign.p(),
            x.p()
        )));
    }
    let k = assign.k();
    let mut out = DataMatrix::zeros(k, x.n())?;
    for s in 0..x.n() {
        let col = x.column(s);
        let dst = out.column_mut(s);
        for (i, &v) in col.iter().enumerate() {
            dst[assign.cluster_of(i)] += v;
        }
        for (q, v) in dst.iter_mut().enumerate() {
            *v /= assign.sizes()[q] as f64;
        }
    }
    Ok(out)
}

/// Merge 1-NN components, but keep only the cheapest edges so that exactly
/// `k` components remain. Edges are taken ascending by weight (ties by
/// endpoint pair); an edge that would push the component count below `k` is
/// discarded. Returns the partition and the number of discarded edges.
fn prune_to_exactly_k(
    g: &StructureGraph,
    weights: &[f64],
    nn_edges: &[(usize, usize)],
    k: usize,
) -> (Partition, usize) {
    let q = g.p();
    let mut items: Vec<(f64, usize, usize)> = nn_edges
        .iter()
        .map(|&(i, j)| {
            let eid = g
                .edge_between(i, j)
                .expect("1-NN edges are structural edges");
            (weights[eid], i, j)
        })
        .collect();
    items.sort_unstable_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (a.1, a.2).cmp(&(b.1, b.2)))
    });

    let mut uf = UnionFind::new(q);
    let mut count = q;
    let mut pruned = 0usize;
    for (_, i, j) in items {
        if uf.find(i) != uf.find(j) {
            if count > k {
                uf.union(i, j);
                count -= 1;
            } else {
                pruned += 1;
            }
        }
    }
    let labels: Vec<usize> = (0..q).map(|v| uf.find(v)).collect();
    let part = Partition::from_labels(&labels).expect("q >= 1");
    (part, pruned)
}

/// Cluster `p` features into exactly `k` groups connected in `g`.
pub fn rena(x: &DataMatrix, g: &StructureGraph, k: usize) -> Result<(Partition, RenaTrace)> {
    let p = g.p();
    if x.p() != p {
        return Err(Error::DimensionMismatch(format!(
            "data has p={} but graph has p={p}",
            x.p()
        )));
    }
    if k == 0 || k > p {
        return Err(Error::InvalidArgument(format!(
            "k = {k} out of range [1, {p}]"
        )));
    }
    x.ensure_finite()?;
    let base_components = connected_components(g).k();
    if base_components > k {
        return Err(Error::Infeasible {
            components: base_components,
            k,
        });
    }

    let mut trace = RenaTrace {
        iterations: 0,
        cluster_counts: Vec::new(),
        pruned_edges: 0,
    };
    if k == p {
        return Ok((Partition::singletons(p)?, trace));
    }

    let mut orig_to_cur: Vec<usize> = (0..p).collect();
    let mut cur_x = x.clone();
    let mut cur_g = g.clone();
    let mut q = p;

    while q > k {
        let weights = edge_weights(&cur_x, &cur_g)?;
        let nn_edges = one_nn_edges(&cur_g, &weights);
        let nn = StructureGraph::from_edges(q, nn_edges.iter().cloned())?;
        let mut round = connected_components(&nn);
        if round.k() < k {
            let (pruned_round, removed) = prune_to_exactly_k(&cur_g, &weights, &nn_edges, k);
            trace.pruned_edges += removed;
            round = pruned_round;
        }
        debug_assert!(round.k() >= k && round.k() < q, "every round must shrink");

        for label in orig_to_cur.iter_mut() {
            *label = round.cluster_of(*label);
        }
        cur_x = reduce_data(&round, &cur_x)?;
        cur_g = reduce_structure(&round, &cur_g)?;
        q = round.k();
        trace.iterations += 1;
        trace.cluster_counts.push(q);
    }

    let partition = Partition::from_labels(&orig_to_cur)?;
    debug_assert_eq!(partition.k(), k);
    Ok((partition, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_lattice_graph;

    #[test]
    fn similarity_weights_on_chain() {
        let g = build_lattice_graph(&[3]).unwrap();
        let x = DataMatrix::from_vec(3, 1, vec![0.0, 0.0, 10.0]).unwrap();
        let wg = similarity_graph(&x, &g).unwrap();
        assert_eq!(wg.weight_between(0, 1).unwrap(), 0.0);
        assert_eq!(wg.weight_between(1, 2).unwrap(), 100.0);
    }

    #[test]
    fn similarity_identical_rows_all_zero() {
        let g = build_lattice_graph(&[2, 2]).unwrap();
        let x = DataMatrix::from_vec(4, 2, vec![1.0; 8]).unwrap();
        let wg = similarity_graph(&x, &g).unwrap();
        for eid in 0..wg.graph().edge_count() {
            assert_eq!(wg.weight(eid), 0.0);
        }
    }

    #[test]
    fn one_nn_hand_example() {
        // weights {(0,1): 0, (1,2): 100}: 0 -> 1, 1 -> 0, 2 -> 1
        let g = build_lattice_graph(&[3]).unwrap();
        let wg = WeightedGraph::new(g, vec![0.0, 100.0]).unwrap();
        let nn = one_nn_subgraph(&wg);
        assert_eq!(nn.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn one_nn_single_edge() {
        let g = StructureGraph::from_edges(2, [(0, 1)]).unwrap();
        let wg = WeightedGraph::new(g, vec![3.0]).unwrap();
        assert_eq!(one_nn_subgraph(&wg).edges(), &[(0, 1)]);
    }

    #[test]
    fn one_nn_star_tie_break() {
        // star centered at 0 with equal weights: center picks leaf 1 (the
        // lowest index), each leaf picks the center, so the star survives.
        let g = StructureGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let wg = WeightedGraph::new(g, vec![1.0, 1.0, 1.0]).unwrap();
        let nn = one_nn_subgraph(&wg);
        assert_eq!(nn.edges(), &[(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn one_nn_isolated_vertex() {
        let g = StructureGraph::from_edges(3, [(0, 1)]).unwrap();
        let wg = WeightedGraph::new(g, vec![1.0]).unwrap();
        let nn = one_nn_subgraph(&wg);
        assert_eq!(nn.edges(), &[(0, 1)]);
        assert_eq!(nn.degree(2), 0);
    }

    #[test]
    fn reduce_structure_merge_on_chain() {
        let g = build_lattice_graph(&[3]).unwrap();
        let assign = Partition::new(vec![0, 0, 1], 2).unwrap();
        let red = reduce_structure(&assign, &g).unwrap();
        assert_eq!(red.p(), 2);
        assert_eq!(red.edges(), &[(0, 1)]);
    }

    #[test]
    fn reduce_structure_identity() {
        let g = build_lattice_graph(&[2, 3]).unwrap();
        let ident = Partition::singletons(6).unwrap();
        let red = reduce_structure(&ident, &g).unwrap();
        assert_eq!(red.edges(), g.edges());
    }

    #[test]
    fn reduce_data_means_and_identity() {
        let x = DataMatrix::from_vec(2, 1, vec![0.0, 2.0]).unwrap();
        let merged = Partition::single_cluster(2).unwrap();
        assert_eq!(reduce_data(&merged, &x).unwrap().values(), &[1.0]);

        let ident = Partition::singletons(2).unwrap();
        assert_eq!(reduce_data(&ident, &x).unwrap().values(), x.values());
    }

    #[test]
    fn rena_k_equals_p() {
        let g = build_lattice_graph(&[4]).unwrap();
        let x = DataMatrix::from_vec(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let (part, trace) = rena(&x, &g, 4).unwrap();
        assert_eq!(part.k(), 4);
        assert_eq!(trace.iterations, 0);
        assert_eq!(part.assignment(), &[0, 1, 2, 3]);
    }

    #[test]
    fn rena_two_blocks_one_round() {
        let g = build_lattice_graph(&[4]).unwrap();
        let x = DataMatrix::from_vec(4, 1, vec![0.0, 0.0, 10.0, 10.0]).unwrap();
        let (part, trace) = rena(&x, &g, 2).unwrap();
        assert_eq!(part.assignment(), &[0, 0, 1, 1]);
        assert_eq!(trace.iterations, 1);
        assert_eq!(trace.pruned_edges, 0);
    }

    #[test]
    fn rena_prunes_heaviest_nn_edge() {
        // 1-NN graph is the full chain (one component); pruning keeps only
        // the cheapest edge (0,1), leaving {{0,1},{2}}.
        let g = build_lattice_graph(&[3]).unwrap();
        let x = DataMatrix::from_vec(3, 1, vec![0.0, 1.0, 10.0]).unwrap();
        let (part, trace) = rena(&x, &g, 2).unwrap();
        assert_eq!(part.assignment(), &[0, 0, 1]);
        assert_eq!(trace.pruned_edges, 1);
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn rena_rejects_bad_k_and_disconnected() {
        let g = build_lattice_graph(&[4]).unwrap();
        let x = DataMatrix::from_vec(4, 1, vec![0.0; 4]).unwrap();
        assert!(rena(&x, &g, 0).is_err());
        assert!(rena(&x, &g, 5).is_err());

        let disc = StructureGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        match rena(&x, &disc, 1) {
            Err(Error::Infeasible { components, k }) => {
                assert_eq!((components, k), (2, 1));
            }
            other => panic!("expected infeasible error, got {other:?}"),
        }
    }

    #[test]
    fn rena_isolated_vertices_keep_own_cluster() {
        let g = StructureGraph::from_edges(3, [(0, 1)]).unwrap();
        let x = DataMatrix::from_vec(3, 1, vec![0.0, 0.1, 5.0]).unwrap();
        let (part, _) = rena(&x, &g, 2).unwrap();
        assert_eq!(part.assignment(), &[0, 0, 1]);
    }
}
