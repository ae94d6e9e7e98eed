//! Sparse graph primitives: lattice construction, connected components, BFS
//! distances, cluster diameters, and minimum spanning forests.
//!
//! All graphs are undirected, unweighted in structure, with unit edge lengths
//! for geodesic distances. Vertex ids live in `[0, p)`.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Hop-distance sentinel for unreachable vertices.
pub const UNREACHABLE: u32 = u32::MAX;

/// Sparse symmetric adjacency over `p` vertices. Each undirected edge is
/// stored once in the canonical edge list (`i < j`, sorted), and twice in the
/// CSR neighbor lists for O(degree) iteration.
#[derive(Debug, Clone)]
pub struct StructureGraph {
    p: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    /// Edge id (index into `edges`) parallel to `neighbors`.
    edge_ids: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl StructureGraph {
    /// Build from an edge list. Pairs are normalized to `(min, max)` and
    /// deduplicated; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop ({a}, {b})")));
            }
            if a >= p || b >= p {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) out of range for p={p}"
                )));
            }
            canon.push((a.min(b), a.max(b)));
        }
        if !canon.windows(2).all(|w| w[0] <= w[1]) {
            canon.sort_unstable();
        }
        canon.dedup();

        let mut degree = vec![0usize; p];
        for &(i, j) in &canon {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(p + 1);
        offsets.push(0);
        for v in 0..p {
            offsets.push(offsets[v] + degree[v]);
        }
        let total = offsets[p];
        let mut neighbors = vec![0usize; total];
        let mut edge_ids = vec![0usize; total];
        let mut cursor = offsets.clone();
        for (eid, &(i, j)) in canon.iter().enumerate() {
            neighbors[cursor[i]] = j;
            edge_ids[cursor[i]] = eid;
            cursor[i] += 1;
            neighbors[cursor[j]] = i;
            edge_ids[cursor[j]] = eid;
            cursor[j] += 1;
        }
        // Canonical edge order makes each neighbor list ascending.
        Ok(StructureGraph {
            p,
            offsets,
            neighbors,
            edge_ids,
            edges: canon,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbors of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbor, edge id)` pairs for `v`, neighbor-ascending.
    pub fn neighbor_entries(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let lo = self.offsets[v];
        let hi = self.offsets[v + 1];
        (lo..hi).map(move |t| (self.neighbors[t], self.edge_ids[t]))
    }

    /// Edge id joining `a` and `b`, if present.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let list = self.neighbors(a);
        let base = self.offsets[a];
        list.binary_search(&b).ok().map(|t| self.edge_ids[base + t])
    }
}

/// A structure graph with one nonnegative weight per edge (indexed by edge
/// id of the base graph).
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    graph: StructureGraph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(graph: StructureGraph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edge_count()
            )));
        }
        for (eid, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                let (i, j) = graph.edges()[eid];
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) has invalid weight {w}"
                )));
            }
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn graph(&self) -> &StructureGraph {
        &self.graph
    }

    pub fn weight(&self, edge_id: usize) -> f64 {
        self.weights[edge_id]
    }

    /// Weights aligned with `graph().edges()`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_between(&self, a: usize, b: usize) -> Option<f64> {
        self.graph.edge_between(a, b).map(|e| self.weights[e])
    }
}

/// Disjoint cover of `[0, p)` by `k` non-empty clusters with dense ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl Partition {
    /// Validate an assignment with dense cluster ids in `[0, k)`.
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidArgument("empty assignment".into()));
        }
        if k == 0 || k > assignment.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} out of range for p = {}",
                assignment.len()
            )));
        }
        let mut sizes = vec![0usize; k];
        for (i, &c) in assignment.iter().enumerate() {
            if c >= k {
                return Err(Error::InvalidArgument(format!(
                    "feature {i} assigned to cluster {c} >= k = {k}"
                )));
            }
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidArgument(format!("cluster {empty} is empty")));
        }
        Ok(Partition {
            assignment,
            k,
            sizes,
        })
    }

    /// Canonicalize arbitrary labels: clusters are renumbered in order of
    /// first appearance, so equal groupings yield identical partitions.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("empty assignment".into()));
        }
        let mut remap: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = remap.len();
            let id = *remap.entry(l).or_insert(next);
            assignment.push(id);
        }
        let k = remap.len();
        Partition::new(assignment, k)
    }

    pub fn singletons(p: usize) -> Result<Self> {
        Partition::new((0..p).collect(), p)
    }

    pub fn single_cluster(p: usize) -> Result<Self> {
        Partition::new(vec![0; p], 1)
    }

    pub fn p(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, feature: usize) -> usize {
        self.assignment[feature]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Member lists per cluster, each ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Regular lattice over `dims` (1D chain, 2D 4-connectivity, 3D
/// 6-connectivity). Vertex indexing is row-major with the last axis fastest.
pub fn build_lattice_graph(dims: &[usize]) -> Result<StructureGraph> {
    if dims.is_empty() || dims.len() > 3 {
        return Err(Error::InvalidArgument(format!(
            "lattice needs 1-3 dimensions, got {}",
            dims.len()
        )));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!("zero dimension in {dims:?}")));
    }
    let mut p: usize = 1;
    for &d in dims {
        p = p
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidArgument(format!("lattice {dims:?} overflows")))?;
    }

    let nd = dims.len();
    let mut strides = vec![1usize; nd];
    for a in (0..nd.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }

    let mut edges = Vec::new();
    let mut coord = vec![0usize; nd];
    for idx in 0..p {
        for a in 0..nd {
            if coord[a] + 1 < dims[a] {
                edges.push((idx, idx + strides[a]));
            }
        }
        // row-major increment, last axis fastest
        for a in (0..nd).rev() {
            coord[a] += 1;
            if coord[a] < dims[a] {
                break;
            }
            coord[a] = 0;
        }
    }
    StructureGraph::from_edges(p, edges)
}

/// Connected components labeled in order of first-visited vertex (iterative
/// DFS, no recursion).
pub fn connected_components(g: &StructureGraph) -> Partition {
    let p = g.p();
    let mut label = vec![usize::MAX; p];
    let mut k = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    for root in 0..p {
        if label[root] != usize::MAX {
            continue;
        }
        label[root] = k;
        stack.push(root);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = k;
                    stack.push(w);
                }
            }
        }
        k += 1;
    }
    Partition::new(label, k).expect("component labels are dense by construction")
}

/// Hop distances from `source`; `UNREACHABLE` marks other components.
pub fn bfs_distances(g: &StructureGraph, source: usize) -> Result<Vec<u32>> {
    if source >= g.p() {
        return Err(Error::InvalidArgument(format!(
            "source {source} out of range for p={}",
            g.p()
        )));
    }
    let mut dist = vec![UNREACHABLE; g.p()];
    dist[source] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v] + 1;
        for &w in g.neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = d;
                queue.push_back(w);
            }
        }
    }
    Ok(dist)
}

/// BFS from `source` that stops once every target is reached. Returns the
/// distance for each entry of `targets` (`UNREACHABLE` if disconnected).
pub(crate) fn bfs_to_targets(g: &StructureGraph, source: usize, targets: &[usize]) -> Vec<u32> {
    let p = g.p();
    let mut is_target = vec![false; p];
    let mut remaining = 0usize;
    for &t in targets {
        if !is_target[t] {
            is_target[t] = true;
            remaining += 1;
        }
    }
    let mut dist = vec![UNREACHABLE; p];
    dist[source] = 0;
    if is_target[source] {
        remaining -= 1;
    }
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while remaining > 0 {
        let Some(v) = queue.pop_front() else { break };
        let d = dist[v] + 1;
        for &w in g.neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = d;
                if is_target[w] {
                    remaining -= 1;
                }
                queue.push_back(w);
            }
        }
    }
    targets.iter().map(|&t| dist[t]).collect()
}

fn validate_cluster(g: &StructureGraph, cluster: &[usize]) -> Result<()> {
    if cluster.is_empty() {
        return Err(Error::InvalidArgument("empty cluster".into()));
    }
    if let Some(&v) = cluster.iter().find(|&&v| v >= g.p()) {
        return Err(Error::InvalidArgument(format!(
            "cluster vertex {v} out of range for p={}",
            g.p()
        )));
    }
    Ok(())
}

/// Maximum whole-graph geodesic distance between any two cluster members.
/// Returns `UNREACHABLE` if the cluster spans disconnected components.
pub fn cluster_diameter(g: &StructureGraph, cluster: &[usize]) -> Result<u32> {
    validate_cluster(g, cluster)?;
    let mut diam = 0u32;
    for (t, &v) in cluster.iter().enumerate() {
        if t + 1 == cluster.len() {
            break;
        }
        let rest = &cluster[t + 1..];
        for d in bfs_to_targets(g, v, rest) {
            if d == UNREACHABLE {
                return Ok(UNREACHABLE);
            }
            diam = diam.max(d);
        }
    }
    Ok(diam)
}

/// Diameter measured inside the cluster-induced subgraph instead of the full
/// graph. Never smaller than [`cluster_diameter`].
pub fn cluster_diameter_induced(g: &StructureGraph, cluster: &[usize]) -> Result<u32> {
    validate_cluster(g, cluster)?;
    let mut sorted: Vec<usize> = cluster.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let local_of = |v: usize| sorted.binary_search(&v).ok();
    let mut edges = Vec::new();
    for (a, &v) in sorted.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(b) = local_of(w) {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
    }
    let sub = StructureGraph::from_edges(sorted.len(), edges)?;
    let mut diam = 0u32;
    for v in 0..sub.p() {
        for &d in bfs_distances(&sub, v)?.iter() {
            if d == UNREACHABLE {
                return Ok(UNREACHABLE);
            }
            diam = diam.max(d);
        }
    }
    Ok(diam)
}

/// Minimum spanning forest by Kruskal; ties broken by `(i, j)` lexicographic
/// order for determinism. Returns `(i, j, weight)` triples, `p - components`
/// of them.
pub fn minimum_spanning_tree(wg: &WeightedGraph) -> Vec<(usize, usize, f64)> {
    let g = wg.graph();
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_unstable_by(|&a, &b| {
        wg.weight(a)
            .total_cmp(&wg.weight(b))
            .then_with(|| g.edges()[a].cmp(&g.edges()[b]))
    });
    let mut uf = UnionFind::new(g.p());
    let mut out = Vec::new();
    for eid in order {
        let (i, j) = g.edges()[eid];
        if uf.union(i, j) {
            out.push((i, j, wg.weight(eid)));
        }
    }
    out
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two sets were distinct and got merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
