//! Independent reference implementations used to judge the pipeline.
//!
//! Everything here favors brute force over cleverness: set intersections
//! instead of incremental counting, exhaustive path enumeration instead of
//! Brandes' accumulation, subset and set-partition enumeration instead of
//! greedy algorithms.  Slow but obviously correct on small inputs.

use std::collections::{BTreeMap, BTreeSet};

/// Truncate a canonical IPC code string to a hierarchy level by slicing:
/// section = 1 char, class = 3, subclass = 4, group = the whole string.
pub fn truncate_str(code: &str, level: &str) -> String {
    match level {
        "section" => code[..1].to_string(),
        "class" => code[..3].to_string(),
        "subclass" => code[..4].to_string(),
        _ => code.to_string(),
    }
}

/// Set-intersection co-occurrence: for every retained code pair, count the
/// records whose code sets contain both.
#[allow(clippy::type_complexity)]
pub fn naive_cooccurrence(
    code_sets: &[BTreeSet<String>],
    min_occurrence: u32,
) -> (BTreeMap<String, u32>, BTreeMap<(String, String), (u32, f64)>) {
    let mut patents_of: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (idx, set) in code_sets.iter().enumerate() {
        for code in set {
            patents_of.entry(code).or_default().insert(idx);
        }
    }
    let occurrence: BTreeMap<String, u32> = patents_of
        .iter()
        .filter(|(_, records)| records.len() as u32 >= min_occurrence)
        .map(|(code, records)| (code.to_string(), records.len() as u32))
        .collect();

    let retained: Vec<&String> = occurrence.keys().collect();
    let mut edges = BTreeMap::new();
    for (i, a) in retained.iter().enumerate() {
        for b in &retained[i + 1..] {
            let set_a = &patents_of[a.as_str()];
            let set_b = &patents_of[b.as_str()];
            let n_ij = set_a.intersection(set_b).count() as u32;
            if n_ij >= 1 {
                let n_i = occurrence[*a];
                let n_j = occurrence[*b];
                let r = n_ij as f64 / (n_i + n_j - n_ij) as f64;
                edges.insert(((*a).clone(), (*b).clone()), (n_ij, r));
            }
        }
    }
    (occurrence, edges)
}

/// Betweenness by enumerating every simple path between every ordered pair
/// and keeping the minimum-cost ones.  Edge costs must be dyadic rationals
/// so path sums compare exactly.
pub fn brute_betweenness(
    n: usize,
    edges: &[(usize, usize, f64)],
    weighted: bool,
    normalized: bool,
) -> Vec<f64> {
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, d) in edges {
        let cost = if weighted { d } else { 1.0 };
        adj[a].push((b, cost));
        adj[b].push((a, cost));
    }

    let mut score = vec![0.0f64; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            // All simple paths from s to t with their costs.
            let mut best = f64::INFINITY;
            let mut total_paths = 0u64;
            let mut through = vec![0u64; n];
            let mut visited = vec![false; n];
            let mut interior = Vec::new();
            visited[s] = true;
            walk(
                s,
                t,
                0.0,
                &adj,
                &mut visited,
                &mut interior,
                &mut best,
                &mut total_paths,
                &mut through,
            );
            if total_paths == 0 {
                continue;
            }
            for v in 0..n {
                if v != s && v != t && through[v] > 0 {
                    score[v] += through[v] as f64 / total_paths as f64;
                }
            }
        }
    }
    let scale = if normalized {
        if n > 2 {
            1.0 / ((n - 1) as f64 * (n - 2) as f64)
        } else {
            0.0
        }
    } else {
        0.5
    };
    score.iter().map(|v| v * scale).collect()
}

#[allow(clippy::too_many_arguments)]
fn walk(
    u: usize,
    t: usize,
    cost: f64,
    adj: &[Vec<(usize, f64)>],
    visited: &mut Vec<bool>,
    interior: &mut Vec<usize>,
    best: &mut f64,
    total_paths: &mut u64,
    through: &mut Vec<u64>,
) {
    if u == t {
        if cost < *best {
            *best = cost;
            *total_paths = 1;
            through.iter_mut().for_each(|c| *c = 0);
            for &v in interior.iter() {
                through[v] += 1;
            }
        } else if cost == *best {
            *total_paths += 1;
            for &v in interior.iter() {
                through[v] += 1;
            }
        }
        return;
    }
    for &(v, step) in &adj[u] {
        if visited[v] || cost + step > *best {
            continue;
        }
        visited[v] = true;
        interior.push(v);
        walk(v, t, cost + step, adj, visited, interior, best, total_paths, through);
        interior.pop();
        visited[v] = false;
    }
}

fn canonical_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[rb] = ra;
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut root_label: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        let entry = *root_label.entry(root).or_insert_with(|| {
            let l = next;
            next += 1;
            l
        });
        label[v] = entry;
    }
    label
}

/// Minimum total weight over every spanning forest, by trying all acyclic
/// edge subsets that preserve the graph's connectivity partition.
pub fn exhaustive_min_forest_weight(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    assert!(edges.len() <= 20, "subset enumeration needs few edges");
    let topology: Vec<(usize, usize)> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
    let target = canonical_components(n, &topology);
    // A forest has exactly (nodes - components) edges; anything larger has
    // a cycle, anything smaller cannot match the partition.
    let components = target.iter().copied().max().map_or(n, |m| m + 1);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << edges.len()) {
        let subset: Vec<(usize, usize)> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &(a, b, _))| (a, b))
            .collect();
        if subset.len() != n - components {
            continue;
        }
        if canonical_components(n, &subset) != target {
            continue;
        }
        let weight: f64 = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &(_, _, w))| w)
            .sum();
        if weight < best {
            best = weight;
        }
    }
    best
}

/// Weighted modularity of a labelling, straight from the definition.
pub fn modularity_reference(
    n: usize,
    edges: &[(usize, usize, f64)],
    labels: &[usize],
    resolution: f64,
) -> f64 {
    let mut strength = vec![0.0f64; n];
    let mut two_m = 0.0f64;
    for &(a, b, w) in edges {
        strength[a] += w;
        strength[b] += w;
        two_m += 2.0 * w;
    }
    if two_m == 0.0 {
        return 0.0;
    }
    let communities = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut internal = vec![0.0f64; communities];
    let mut total = vec![0.0f64; communities];
    for &(a, b, w) in edges {
        if labels[a] == labels[b] {
            internal[labels[a]] += 2.0 * w;
        }
    }
    for (v, &label) in labels.iter().enumerate() {
        total[label] += strength[v];
    }
    (0..communities)
        .map(|c| internal[c] / two_m - resolution * (total[c] / two_m).powi(2))
        .sum()
}

/// Exhaustive maximum-modularity partition via restricted growth strings.
pub fn exhaustive_max_modularity(
    n: usize,
    edges: &[(usize, usize, f64)],
    resolution: f64,
) -> (Vec<usize>, f64) {
    assert!(n <= 10, "set-partition enumeration needs few nodes");
    let mut rgs = vec![0usize; n];
    let mut best_q = f64::NEG_INFINITY;
    let mut best = rgs.clone();
    enumerate_rgs(&mut rgs, 1, 1, &mut |labels| {
        let q = modularity_reference(n, edges, labels, resolution);
        if q > best_q {
            best_q = q;
            best = labels.to_vec();
        }
    });
    (best, best_q)
}

fn enumerate_rgs(rgs: &mut Vec<usize>, pos: usize, blocks: usize, visit: &mut impl FnMut(&[usize])) {
    if pos == rgs.len() {
        visit(rgs);
        return;
    }
    for label in 0..=blocks {
        rgs[pos] = label;
        let next_blocks = blocks.max(label + 1);
        enumerate_rgs(rgs, pos + 1, next_blocks, visit);
    }
}
