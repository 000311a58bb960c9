//! Network statistics over co-occurrence and distance graphs: degree,
//! connected components, Brandes betweenness centrality, Louvain community
//! detection with a resolution parameter, and Kruskal minimum spanning
//! forests.
//!
//! All functions are deterministic. Where an algorithm is order-sensitive
//! (Louvain's sweep, Kruskal under equal weights) the order is pinned: a
//! seeded shuffle for Louvain, canonical code-text tie-breaks for Kruskal.
//! Community and component labels are renumbered by descending size with
//! lexicographic tie-breaks, so labels are stable across runs and platforms.

use alloc::collections::{BTreeMap, BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::graph::{CodePair, CooccurrenceGraph, DistanceGraph};
use crate::ipc::IpcCode;

/// Error from metric queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    /// Query about a code that is not a node of the graph.
    UnknownNode { code: IpcCode },
    /// A partition that does not label exactly the graph's node set.
    PartitionMismatch { code: IpcCode },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::UnknownNode { code } => write!(f, "unknown node {code}"),
            MetricsError::PartitionMismatch { code } => {
                write!(f, "partition does not match graph at {code}")
            }
        }
    }
}

impl core::error::Error for MetricsError {}

/// Read-only view that both graph flavors expose to the metric algorithms.
///
/// Every edge carries two weights: a `similarity` (larger = more associated;
/// the Jaccard index on co-occurrence graphs) used by Louvain, and a
/// `distance` (smaller = closer; inverse Jaccard) used by weighted shortest
/// paths. The two are reciprocal on both graph flavors.
pub trait IpcNetwork {
    /// Nodes in canonical order, with their patent occurrence counts.
    fn node_occurrences(&self) -> Vec<(&IpcCode, u32)>;
    /// Edges in canonical order as (source, target, similarity, distance).
    fn weighted_edges(&self) -> Vec<(&IpcCode, &IpcCode, f64, f64)>;
    fn has_node(&self, code: &IpcCode) -> bool;
}

impl IpcNetwork for CooccurrenceGraph {
    fn node_occurrences(&self) -> Vec<(&IpcCode, u32)> {
        self.nodes().iter().map(|(code, &n)| (code, n)).collect()
    }

    fn weighted_edges(&self) -> Vec<(&IpcCode, &IpcCode, f64, f64)> {
        self.edges()
            .iter()
            .map(|(pair, edge)| {
                (
                    pair.source(),
                    pair.target(),
                    edge.jaccard,
                    1.0 / edge.jaccard,
                )
            })
            .collect()
    }

    fn has_node(&self, code: &IpcCode) -> bool {
        self.nodes().contains_key(code)
    }
}

impl IpcNetwork for DistanceGraph {
    fn node_occurrences(&self) -> Vec<(&IpcCode, u32)> {
        self.nodes().iter().map(|(code, &n)| (code, n)).collect()
    }

    fn weighted_edges(&self) -> Vec<(&IpcCode, &IpcCode, f64, f64)> {
        self.edges()
            .iter()
            .map(|(pair, &d)| (pair.source(), pair.target(), 1.0 / d, d))
            .collect()
    }

    fn has_node(&self, code: &IpcCode) -> bool {
        self.nodes().contains_key(code)
    }
}

/// Dense index over a network: nodes in canonical order, adjacency lists
/// with both weights. All algorithms below work on this.
struct Indexed {
    codes: Vec<IpcCode>,
    adj: Vec<Vec<(usize, f64, f64)>>,
    edges: Vec<(usize, usize, f64, f64)>,
}

impl Indexed {
    fn build(network: &(impl IpcNetwork + ?Sized)) -> Indexed {
        let codes: Vec<IpcCode> = network
            .node_occurrences()
            .into_iter()
            .map(|(code, _)| code.clone())
            .collect();
        let index: BTreeMap<&IpcCode, usize> =
            codes.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut adj = vec![Vec::new(); codes.len()];
        let mut edges = Vec::new();
        for (source, target, similarity, distance) in network.weighted_edges() {
            let u = index[source];
            let v = index[target];
            adj[u].push((v, similarity, distance));
            adj[v].push((u, similarity, distance));
            edges.push((u, v, similarity, distance));
        }
        Indexed { codes, adj, edges }
    }

    fn len(&self) -> usize {
        self.codes.len()
    }
}

/// Total order on finite floats, for heaps and sorts.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("weights are finite")
    }
}

/// Number of edges incident to `code` (unweighted).
pub fn degree(
    network: &(impl IpcNetwork + ?Sized),
    code: &IpcCode,
) -> Result<usize, MetricsError> {
    degrees(network)
        .remove(code)
        .ok_or_else(|| MetricsError::UnknownNode { code: code.clone() })
}

/// Unweighted degree of every node.
pub fn degrees(network: &(impl IpcNetwork + ?Sized)) -> BTreeMap<IpcCode, usize> {
    let indexed = Indexed::build(network);
    indexed
        .codes
        .iter()
        .enumerate()
        .map(|(i, code)| (code.clone(), indexed.adj[i].len()))
        .collect()
}

/// A labeling of nodes into dense integer classes `0..community_count()`,
/// renumbered so that label 0 is the largest class (ties broken by the
/// lexicographically smallest member). Used for both connected components
/// and Louvain communities, so labels are comparable across runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: BTreeMap<IpcCode, usize>,
    count: usize,
}

impl Partition {
    /// Renumber arbitrary raw labels into the canonical dense labeling.
    pub fn from_raw_labels(raw: BTreeMap<IpcCode, usize>) -> Partition {
        let mut groups: BTreeMap<usize, (usize, Option<&IpcCode>)> = BTreeMap::new();
        for (code, &label) in &raw {
            let entry = groups.entry(label).or_insert((0, None));
            entry.0 += 1;
            if entry.1.is_none() {
                entry.1 = Some(code); // BTreeMap iteration → first member is smallest
            }
        }
        let mut order: Vec<(usize, usize, &IpcCode)> = groups
            .iter()
            .map(|(&label, &(size, min))| (label, size, min.expect("non-empty group")))
            .collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.2.cmp(b.2)));
        let renumber: BTreeMap<usize, usize> = order
            .iter()
            .enumerate()
            .map(|(new, &(old, _, _))| (old, new))
            .collect();
        let count = renumber.len();
        let labels = raw
            .into_iter()
            .map(|(code, label)| (code, renumber[&label]))
            .collect();
        Partition { labels, count }
    }

    pub fn labels(&self) -> &BTreeMap<IpcCode, usize> {
        &self.labels
    }

    pub fn label_of(&self, code: &IpcCode) -> Option<usize> {
        self.labels.get(code).copied()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    /// Class sizes indexed by label (descending by construction).
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count];
        for &label in self.labels.values() {
            sizes[label] += 1;
        }
        sizes
    }

    /// Members of one class, in canonical order.
    pub fn members(&self, label: usize) -> Vec<&IpcCode> {
        self.labels
            .iter()
            .filter(|&(_, &l)| l == label)
            .map(|(code, _)| code)
            .collect()
    }
}

/// Maximal connected node sets, labeled canonically (see [`Partition`]).
pub fn connected_components(network: &(impl IpcNetwork + ?Sized)) -> Partition {
    let indexed = Indexed::build(network);
    let n = indexed.len();
    let mut raw = vec![usize::MAX; n];
    let mut next = 0usize;
    for start in 0..n {
        if raw[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        raw[start] = next;
        while let Some(v) = queue.pop_front() {
            for &(w, _, _) in &indexed.adj[v] {
                if raw[w] == usize::MAX {
                    raw[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    Partition::from_raw_labels(
        indexed
            .codes
            .iter()
            .cloned()
            .zip(raw.iter().copied())
            .collect(),
    )
}

/// Betweenness centrality of every node (Brandes' accumulation).
///
/// Paths are undirected. With `use_weights` off, shortest paths count hops;
/// on, they minimize summed distance weights (inverse Jaccard on
/// co-occurrence graphs) via Dijkstra. Unnormalized values count each
/// unordered pair once. Normalization divides by `(n-1)(n-2)/2` with `n`
/// the graph's TOTAL node count — also in disconnected graphs, which keeps
/// the scores comparable across components at the cost of never reaching
/// 1.0 there. Graphs with `n <= 2` score zero everywhere.
pub fn betweenness_centrality(
    network: &(impl IpcNetwork + ?Sized),
    normalized: bool,
    use_weights: bool,
) -> BTreeMap<IpcCode, f64> {
    let indexed = Indexed::build(network);
    let n = indexed.len();
    let accumulated = if use_weights {
        brandes_weighted(&indexed)
    } else {
        brandes_unweighted(&indexed)
    };
    let scale = if normalized {
        if n > 2 {
            // Accumulation counts ordered pairs; unordered halving and the
            // (n-1)(n-2)/2 normalizer combine into one factor.
            1.0 / ((n - 1) as f64 * (n - 2) as f64)
        } else {
            0.0
        }
    } else {
        0.5
    };
    indexed
        .codes
        .iter()
        .cloned()
        .zip(accumulated.into_iter().map(|b| b * scale))
        .collect()
}

fn brandes_unweighted(indexed: &Indexed) -> Vec<f64> {
    let n = indexed.len();
    let mut centrality = vec![0.0f64; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for s in 0..n {
        stack.clear();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(w, _, _) in &indexed.adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    pred[w].push(v);
                }
            }
        }
        accumulate(&mut centrality, &stack, &pred, &sigma, s);
    }
    centrality
}

fn brandes_weighted(indexed: &Indexed) -> Vec<f64> {
    let n = indexed.len();
    let mut centrality = vec![0.0f64; n];
    for s in 0..n {
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![f64::INFINITY; n];
        let mut settled = vec![false; n];
        sigma[s] = 1.0;
        dist[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((OrdF64(0.0), s)));
        while let Some(Reverse((OrdF64(d), v))) = heap.pop() {
            if settled[v] || d > dist[v] {
                continue;
            }
            settled[v] = true;
            order.push(v);
            for &(w, _, len) in &indexed.adj[v] {
                let candidate = dist[v] + len;
                if candidate < dist[w] {
                    dist[w] = candidate;
                    sigma[w] = sigma[v];
                    pred[w].clear();
                    pred[w].push(v);
                    heap.push(Reverse((OrdF64(candidate), w)));
                } else if candidate == dist[w] && !settled[w] {
                    sigma[w] += sigma[v];
                    pred[w].push(v);
                }
            }
        }
        accumulate(&mut centrality, &order, &pred, &sigma, s);
    }
    centrality
}

/// Dependency accumulation shared by both path modes: walk vertices in
/// reverse settle order and push each vertex's dependency onto its
/// shortest-path predecessors.
fn accumulate(centrality: &mut [f64], order: &[usize], pred: &[Vec<usize>], sigma: &[f64], s: usize) {
    let mut delta = vec![0.0f64; centrality.len()];
    for &w in order.iter().rev() {
        for &v in &pred[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            centrality[w] += delta[w];
        }
    }
}

/// Multi-level Louvain community detection over similarity weights.
///
/// The sweep order is a seeded shuffle, reshuffled each pass from the same
/// stream, so identical (graph, seed, resolution) inputs give identical
/// partitions. A node moves only on a strict modularity gain; ties keep it
/// where it is (or take the smaller community label), which makes the local
/// phase terminate. Isolated nodes never move and end up as singletons.
/// Returns the partition and its modularity, re-evaluated on the input
/// graph rather than trusted from the incremental bookkeeping.
pub fn louvain_communities(
    network: &(impl IpcNetwork + ?Sized),
    resolution: f64,
    seed: u64,
) -> (Partition, f64) {
    let indexed = Indexed::build(network);
    let n = indexed.len();
    if n == 0 {
        return (
            Partition {
                labels: BTreeMap::new(),
                count: 0,
            },
            0.0,
        );
    }

    let two_m: f64 = 2.0 * indexed.edges.iter().map(|&(_, _, w, _)| w).sum::<f64>();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    // Level state: adjacency between current super-nodes (no self entries),
    // self-loop mass per super-node (double-counted internal weight), and
    // the mapping from original nodes to super-nodes.
    let mut adj: Vec<BTreeMap<usize, f64>> = {
        let mut adj = vec![BTreeMap::new(); n];
        for &(u, v, w, _) in &indexed.edges {
            *adj[u].entry(v).or_insert(0.0) += w;
            *adj[v].entry(u).or_insert(0.0) += w;
        }
        adj
    };
    let mut loops = vec![0.0f64; n];
    let mut node_to_super: Vec<usize> = (0..n).collect();

    if two_m > 0.0 {
        loop {
            let level_n = adj.len();
            let k: Vec<f64> = (0..level_n)
                .map(|u| loops[u] + adj[u].values().sum::<f64>())
                .collect();
            let mut community: Vec<usize> = (0..level_n).collect();
            let mut sigma_tot = k.clone();
            let mut order: Vec<usize> = (0..level_n).collect();

            let mut improved_level = false;
            loop {
                shuffle(&mut order, &mut rng);
                let mut moved = false;
                for &u in &order {
                    let c_old = community[u];
                    let mut neighbor_weight: BTreeMap<usize, f64> = BTreeMap::new();
                    for (&v, &w) in &adj[u] {
                        *neighbor_weight.entry(community[v]).or_insert(0.0) += w;
                    }
                    sigma_tot[c_old] -= k[u];
                    let gain_of = |c: usize| {
                        neighbor_weight.get(&c).copied().unwrap_or(0.0)
                            - resolution * k[u] * sigma_tot[c] / two_m
                    };
                    let mut best = (c_old, gain_of(c_old));
                    for &c in neighbor_weight.keys() {
                        if c == c_old {
                            continue;
                        }
                        let gain = gain_of(c);
                        if gain > best.1 || (gain == best.1 && c < best.0) {
                            best = (c, gain);
                        }
                    }
                    sigma_tot[best.0] += k[u];
                    if best.0 != c_old {
                        community[u] = best.0;
                        moved = true;
                        improved_level = true;
                    }
                }
                if !moved {
                    break;
                }
            }

            if !improved_level {
                break;
            }

            // Renumber communities densely in order of first appearance.
            let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
            for &c in &community {
                let next = dense.len();
                dense.entry(c).or_insert(next);
            }
            let super_n = dense.len();
            if super_n == level_n {
                break; // every move was a label swap; nothing to aggregate
            }

            let mut new_adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); super_n];
            let mut new_loops = vec![0.0f64; super_n];
            for u in 0..level_n {
                let cu = dense[&community[u]];
                new_loops[cu] += loops[u];
                for (&v, &w) in &adj[u] {
                    let cv = dense[&community[v]];
                    if cu == cv {
                        new_loops[cu] += w; // each internal edge visited twice
                    } else {
                        *new_adj[cu].entry(cv).or_insert(0.0) += w;
                    }
                }
            }
            for label in node_to_super.iter_mut() {
                *label = dense[&community[*label]];
            }
            adj = new_adj;
            loops = new_loops;
        }
    }

    let partition = Partition::from_raw_labels(
        indexed
            .codes
            .iter()
            .cloned()
            .zip(node_to_super.iter().copied())
            .collect(),
    );
    let achieved = modularity(network, &partition, resolution)
        .expect("partition was built over exactly this node set");
    (partition, achieved)
}

fn shuffle(order: &mut [usize], rng: &mut impl RngCore) {
    for i in (1..order.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
}

/// Modularity of a given partition: `Q = Σ_c [Σ_in(c)/(2m) − γ·(Σ_tot(c)/(2m))²]`
/// over similarity weights, where `Σ_in` double-counts internal edges,
/// `Σ_tot` sums member degrees, `m` is total edge weight, and `γ` is the
/// resolution. Pure evaluation — no optimization. Edgeless graphs score 0.
pub fn modularity(
    network: &(impl IpcNetwork + ?Sized),
    partition: &Partition,
    resolution: f64,
) -> Result<f64, MetricsError> {
    let nodes = network.node_occurrences();
    if partition.labels.len() != nodes.len() {
        // Find a witness on whichever side is over-full.
        for (code, _) in &nodes {
            if partition.label_of(code).is_none() {
                return Err(MetricsError::PartitionMismatch {
                    code: (*code).clone(),
                });
            }
        }
        for code in partition.labels.keys() {
            if !network.has_node(code) {
                return Err(MetricsError::PartitionMismatch { code: code.clone() });
            }
        }
    }
    let mut label_of: BTreeMap<&IpcCode, usize> = BTreeMap::new();
    for (code, _) in &nodes {
        match partition.label_of(code) {
            Some(label) => {
                label_of.insert(code, label);
            }
            None => {
                return Err(MetricsError::PartitionMismatch {
                    code: (*code).clone(),
                })
            }
        }
    }

    let classes = partition.count.max(1);
    let mut internal = vec![0.0f64; classes];
    let mut total_degree = vec![0.0f64; classes];
    let mut m = 0.0f64;
    for (source, target, similarity, _) in network.weighted_edges() {
        m += similarity;
        let cs = label_of[source];
        let ct = label_of[target];
        total_degree[cs] += similarity;
        total_degree[ct] += similarity;
        if cs == ct {
            internal[cs] += 2.0 * similarity;
        }
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let two_m = 2.0 * m;
    let q = (0..classes)
        .map(|c| {
            let fraction = total_degree[c] / two_m;
            internal[c] / two_m - resolution * fraction * fraction
        })
        .sum();
    Ok(q)
}

/// A minimum spanning forest: the chosen edges of a distance graph, one
/// spanning tree per connected component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningForest {
    edges: Vec<(CodePair, f64)>,
    total_distance: f64,
}

impl SpanningForest {
    /// Forest edges in canonical order with their distances.
    pub fn edges(&self) -> &[(CodePair, f64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of forest edge distances (summed in canonical edge order).
    pub fn total_distance(&self) -> f64 {
        self.total_distance
    }

    /// The forest as a graph over the source graph's FULL node set, so
    /// isolated nodes survive into exports and metrics.
    pub fn as_graph(&self, source: &DistanceGraph) -> DistanceGraph {
        DistanceGraph::from_distances(
            source.level(),
            source.nodes().clone(),
            self.edges
                .iter()
                .map(|(pair, d)| (pair.source().clone(), pair.target().clone(), *d)),
        )
        .expect("forest edges come from the source graph")
    }
}

/// Kruskal's minimum spanning forest over distance weights.
///
/// Edges are taken in globally sorted order — by distance, then by
/// canonical (source, target) text so equal-weight runs are deterministic —
/// and accepted when they join two different trees. Every component of the
/// input ends up spanned; isolated nodes contribute no edges.
pub fn minimum_spanning_forest(graph: &DistanceGraph) -> SpanningForest {
    let indexed = Indexed::build(graph);
    let mut order: Vec<(OrdF64, usize)> = indexed
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(_, _, _, d))| (OrdF64(d), i))
        .collect();
    // Indices enumerate edges in canonical pair order, so (distance, index)
    // is exactly the documented tie-break.
    order.sort();

    let mut dsu = DisjointSets::new(indexed.len());
    let mut chosen: Vec<(CodePair, f64)> = Vec::new();
    for (OrdF64(distance), i) in order {
        let (u, v, _, _) = indexed.edges[i];
        if dsu.union(u, v) {
            let pair = CodePair::new(indexed.codes[u].clone(), indexed.codes[v].clone())
                .expect("graph edges have distinct endpoints");
            chosen.push((pair, distance));
        }
    }
    chosen.sort_by(|a, b| a.0.cmp(&b.0));
    let total_distance = chosen.iter().map(|&(_, d)| d).sum();
    SpanningForest {
        edges: chosen,
        total_distance,
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> DisjointSets {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// One row of the per-node statistics table.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub code: IpcCode,
    pub occurrence: u32,
    pub component: usize,
    pub modularity_class: usize,
    pub degree: usize,
    pub betweenness: f64,
    pub mst_degree: Option<usize>,
    pub mst_betweenness: Option<f64>,
}

/// Per-node statistics over a co-occurrence network, optionally paired with
/// the node's degree/betweenness in a spanning-forest graph over the same
/// node set. Rows are ordered by descending occurrence, then code.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsTable {
    rows: Vec<MetricsRow>,
    modularity: f64,
}

impl MetricsTable {
    pub fn rows(&self) -> &[MetricsRow] {
        &self.rows
    }

    /// Modularity achieved by the partition in `modularity_class`.
    pub fn modularity(&self) -> f64 {
        self.modularity
    }

    pub fn community_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.modularity_class + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        self.rows.iter().map(|r| r.component + 1).max().unwrap_or(0)
    }
}

/// Compute the full statistics table for a network.
///
/// `forest` is the spanning-forest graph to take `mst_degree` and
/// `mst_betweenness` from; nodes absent from it get empty cells. Forest
/// betweenness is computed unweighted — paths in a forest are unique, so
/// weighting could not change the result anyway.
pub fn metrics_table(
    network: &CooccurrenceGraph,
    forest: Option<&DistanceGraph>,
    resolution: f64,
    seed: u64,
    weighted_betweenness: bool,
) -> MetricsTable {
    let components = connected_components(network);
    let (partition, modularity) = louvain_communities(network, resolution, seed);
    let degree_map = degrees(network);
    let betweenness = betweenness_centrality(network, true, weighted_betweenness);
    let forest_degrees = forest.map(degrees);
    let forest_betweenness = forest.map(|f| betweenness_centrality(f, true, false));

    let mut rows: Vec<MetricsRow> = network
        .nodes()
        .iter()
        .map(|(code, &occurrence)| MetricsRow {
            code: code.clone(),
            occurrence,
            component: components.label_of(code).expect("same node set"),
            modularity_class: partition.label_of(code).expect("same node set"),
            degree: degree_map[code],
            betweenness: betweenness[code],
            mst_degree: forest_degrees.as_ref().map(|d| d[code]),
            mst_betweenness: forest_betweenness.as_ref().map(|b| b[code]),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.occurrence
            .cmp(&a.occurrence)
            .then_with(|| a.code.cmp(&b.code))
    });
    MetricsTable { rows, modularity }
}
