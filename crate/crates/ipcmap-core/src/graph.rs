//! Co-occurrence graph construction: occurrence counting, Jaccard edge
//! weights, threshold filtering, and the inverse-weight distance graph used
//! for spanning forests.
//!
//! Node inclusion and edge existence are two separate rules. A code becomes
//! a node when it occurs in at least `min_occurrence` distinct patents,
//! whether or not it ends up with any edges; an edge exists between two
//! retained nodes iff at least one patent carries both codes. Thresholding
//! drops edges only — isolated nodes are a legitimate network feature, not
//! an artifact to prune.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::Corpus;
use crate::ipc::{IpcCode, IpcLevel};

/// Error from graph construction or weight arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    /// Counts that cannot come from real patent sets (zero occurrences or
    /// an intersection larger than a side).
    InvalidCounts { n_i: u32, n_j: u32, n_ij: u32 },
    /// Both endpoints of a pair are the same code.
    SelfLoop { code: IpcCode },
    /// An edge references a code that is not a node.
    UnknownEndpoint { code: IpcCode },
    /// A distance weight that is not finite and positive.
    InvalidDistance { distance: f64 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidCounts { n_i, n_j, n_ij } => {
                write!(f, "impossible counts: n_i={n_i}, n_j={n_j}, n_ij={n_ij}")
            }
            GraphError::SelfLoop { code } => write!(f, "self-loop on {code}"),
            GraphError::UnknownEndpoint { code } => {
                write!(f, "edge endpoint {code} is not a node")
            }
            GraphError::InvalidDistance { distance } => {
                write!(f, "distance must be finite and positive, got {distance}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

/// Jaccard index of two patent sets from their sizes and intersection:
/// `n_ij / (n_i + n_j - n_ij)`. Zero intersection gives 0, meaning
/// "no edge" — callers must not materialize an edge for it.
pub fn jaccard(n_i: u32, n_j: u32, n_ij: u32) -> Result<f64, GraphError> {
    if n_i == 0 || n_j == 0 || n_ij > n_i || n_ij > n_j {
        return Err(GraphError::InvalidCounts { n_i, n_j, n_ij });
    }
    let union = n_i as u64 + n_j as u64 - n_ij as u64;
    Ok(n_ij as f64 / union as f64)
}

/// Jaccard index rounded half-up to three decimals, as integer thousandths.
/// Computed entirely in integers so the rounding never inherits a binary
/// representation error (e.g. 115/547 must render 0.210, not 0.211).
pub fn jaccard_thousandths(n_i: u32, n_j: u32, n_ij: u32) -> Result<u32, GraphError> {
    if n_i == 0 || n_j == 0 || n_ij > n_i || n_ij > n_j {
        return Err(GraphError::InvalidCounts { n_i, n_j, n_ij });
    }
    let union = n_i as u64 + n_j as u64 - n_ij as u64;
    Ok(((n_ij as u64 * 1000 * 2 + union) / (2 * union)) as u32)
}

/// Unordered pair of distinct codes, stored with the canonically smaller
/// code first so each edge has exactly one representation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodePair {
    a: IpcCode,
    b: IpcCode,
}

impl CodePair {
    pub fn new(x: IpcCode, y: IpcCode) -> Result<CodePair, GraphError> {
        match x.cmp(&y) {
            core::cmp::Ordering::Less => Ok(CodePair { a: x, b: y }),
            core::cmp::Ordering::Greater => Ok(CodePair { a: y, b: x }),
            core::cmp::Ordering::Equal => Err(GraphError::SelfLoop { code: x }),
        }
    }

    /// Canonically smaller endpoint.
    pub fn source(&self) -> &IpcCode {
        &self.a
    }

    /// Canonically larger endpoint.
    pub fn target(&self) -> &IpcCode {
        &self.b
    }
}

impl fmt::Display for CodePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.a, self.b)
    }
}

/// Weight data on one co-occurrence edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoEdge {
    /// Number of distinct patents carrying both endpoint codes.
    pub count: u32,
    /// Jaccard index of the endpoints' patent sets, in (0, 1].
    pub jaccard: f64,
}

/// Undirected co-occurrence graph at one classification level: nodes carry
/// occurrence counts, edges carry co-occurrence counts and Jaccard weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CooccurrenceGraph {
    level: IpcLevel,
    nodes: BTreeMap<IpcCode, u32>,
    edges: BTreeMap<CodePair, CoEdge>,
}

impl CooccurrenceGraph {
    /// Build the graph for `corpus` at `level`.
    ///
    /// Occurrence counts are taken over the full corpus first; only codes
    /// with `N_i >= min_occurrence` become nodes (values below 1 behave as
    /// 1, since every counted code occurs at least once). Co-occurrences
    /// are then counted between retained nodes only, one per patent per
    /// pair regardless of how often the codes repeat within the filing.
    pub fn build(corpus: &Corpus, level: IpcLevel, min_occurrence: u32) -> CooccurrenceGraph {
        let mut occurrence: BTreeMap<IpcCode, u32> = BTreeMap::new();
        for record in corpus.records() {
            for code in record.codes_at_level(level) {
                *occurrence.entry(code).or_insert(0) += 1;
            }
        }
        let nodes: BTreeMap<IpcCode, u32> = occurrence
            .into_iter()
            .filter(|&(_, n)| n >= min_occurrence)
            .collect();

        let mut pair_counts: BTreeMap<CodePair, u32> = BTreeMap::new();
        for record in corpus.records() {
            let retained: Vec<IpcCode> = record
                .codes_at_level(level)
                .into_iter()
                .filter(|code| nodes.contains_key(code))
                .collect();
            for (idx, first) in retained.iter().enumerate() {
                for second in &retained[idx + 1..] {
                    let pair = CodePair::new(first.clone(), second.clone())
                        .expect("codes_at_level yields distinct codes");
                    *pair_counts.entry(pair).or_insert(0) += 1;
                }
            }
        }

        let edges = pair_counts
            .into_iter()
            .map(|(pair, count)| {
                let n_i = nodes[pair.source()];
                let n_j = nodes[pair.target()];
                let jaccard = jaccard(n_i, n_j, count).expect("counts from real patent sets");
                (pair, CoEdge { count, jaccard })
            })
            .collect();

        CooccurrenceGraph {
            level,
            nodes,
            edges,
        }
    }

    /// Assemble a graph from explicit occurrence counts and co-occurrence
    /// counts, validating every structural invariant. Jaccard weights are
    /// derived, not supplied.
    pub fn from_counts(
        level: IpcLevel,
        nodes: BTreeMap<IpcCode, u32>,
        edge_counts: impl IntoIterator<Item = (IpcCode, IpcCode, u32)>,
    ) -> Result<CooccurrenceGraph, GraphError> {
        if nodes.values().any(|&n| n == 0) {
            return Err(GraphError::InvalidCounts {
                n_i: 0,
                n_j: 0,
                n_ij: 0,
            });
        }
        let mut edges = BTreeMap::new();
        for (x, y, count) in edge_counts {
            let pair = CodePair::new(x, y)?;
            let n_i = *nodes
                .get(pair.source())
                .ok_or_else(|| GraphError::UnknownEndpoint {
                    code: pair.source().clone(),
                })?;
            let n_j = *nodes
                .get(pair.target())
                .ok_or_else(|| GraphError::UnknownEndpoint {
                    code: pair.target().clone(),
                })?;
            if count == 0 {
                return Err(GraphError::InvalidCounts {
                    n_i,
                    n_j,
                    n_ij: count,
                });
            }
            let jaccard = jaccard(n_i, n_j, count)?;
            edges.insert(pair, CoEdge { count, jaccard });
        }
        Ok(CooccurrenceGraph {
            level,
            nodes,
            edges,
        })
    }

    pub fn level(&self) -> IpcLevel {
        self.level
    }

    pub fn nodes(&self) -> &BTreeMap<IpcCode, u32> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<CodePair, CoEdge> {
        &self.edges
    }

    pub fn occurrence(&self, code: &IpcCode) -> Option<u32> {
        self.nodes.get(code).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Keep edges with Jaccard `>= r_min` (inclusive). The node set is
    /// untouched and surviving weights are copied bit-exactly.
    pub fn thresholded(&self, r_min: f64) -> CooccurrenceGraph {
        CooccurrenceGraph {
            level: self.level,
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .filter(|(_, edge)| edge.jaccard >= r_min)
                .map(|(pair, edge)| (pair.clone(), *edge))
                .collect(),
        }
    }

    /// Same topology with every edge weight replaced by its inverse Jaccard
    /// index `1/R` — a distance, so that strongly associated codes are
    /// close. Every distance is >= 1.
    pub fn to_distance_graph(&self) -> DistanceGraph {
        DistanceGraph {
            level: self.level,
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|(pair, edge)| (pair.clone(), 1.0 / edge.jaccard))
                .collect(),
        }
    }
}

/// Undirected graph whose edge weights are distances (inverse Jaccard
/// indices or any positive lengths). Nodes keep their occurrence counts so
/// downstream tables and layouts can still size them.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceGraph {
    level: IpcLevel,
    nodes: BTreeMap<IpcCode, u32>,
    edges: BTreeMap<CodePair, f64>,
}

impl DistanceGraph {
    /// Assemble a distance graph from explicit weights, validating that
    /// endpoints are nodes and every distance is finite and positive.
    pub fn from_distances(
        level: IpcLevel,
        nodes: BTreeMap<IpcCode, u32>,
        distances: impl IntoIterator<Item = (IpcCode, IpcCode, f64)>,
    ) -> Result<DistanceGraph, GraphError> {
        let mut edges = BTreeMap::new();
        for (x, y, distance) in distances {
            let pair = CodePair::new(x, y)?;
            for endpoint in [pair.source(), pair.target()] {
                if !nodes.contains_key(endpoint) {
                    return Err(GraphError::UnknownEndpoint {
                        code: endpoint.clone(),
                    });
                }
            }
            if !(distance.is_finite() && distance > 0.0) {
                return Err(GraphError::InvalidDistance { distance });
            }
            edges.insert(pair, distance);
        }
        Ok(DistanceGraph {
            level,
            nodes,
            edges,
        })
    }

    pub fn level(&self) -> IpcLevel {
        self.level
    }

    pub fn nodes(&self) -> &BTreeMap<IpcCode, u32> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<CodePair, f64> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
