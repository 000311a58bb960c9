//! Deterministic ForceAtlas2 layout.
//!
//! The classic force model: degree-weighted repulsion between every node
//! pair, linear (or lin-log) attraction along edges scaled by edge weight,
//! constant gravity toward the origin, and the swing/traction adaptive
//! speed heuristic. Repulsion is computed exactly (O(n²) per iteration, no
//! Barnes–Hut approximation) because the target graphs are small and exact
//! summation keeps runs bit-reproducible.
//!
//! Determinism contract: identical (graph, params) inputs produce
//! bit-identical positions. Initial placement is drawn from a seeded
//! ChaCha8 stream over nodes in canonical order; the iteration itself is
//! free of randomness and of platform-dependent math (all transcendental
//! calls go through `libm`).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::ipc::IpcCode;
use crate::metrics::IpcNetwork;

/// All knobs of one layout run, including the RNG seed; stored alongside
/// the resulting positions so a run can be reproduced from its output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutParams {
    /// Number of force iterations (0 = return the seeded placement).
    pub iterations: u32,
    /// Repulsion strength (`kr`); larger spreads the graph out.
    pub scaling: f64,
    /// Constant pull toward the origin per unit mass; 0 disables.
    pub gravity: f64,
    /// Logarithmic attraction, which tightens clusters.
    pub linlog_mode: bool,
    /// Switch to collision-aware forces for the final 10% of iterations.
    pub prevent_overlap: bool,
    /// Exponent on edge weights in the attraction term (0 ignores weights).
    pub edge_weight_influence: f64,
    /// Seed for the initial placement.
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> LayoutParams {
        LayoutParams {
            iterations: 1000,
            scaling: 2.0,
            gravity: 1.0,
            linlog_mode: false,
            prevent_overlap: true,
            edge_weight_influence: 1.0,
            seed: 42,
        }
    }
}

/// Error from layout parameter or position validation.
#[derive(Clone, Debug, PartialEq)]
pub enum LayoutError {
    InvalidParams { reason: &'static str },
    /// Supplied starting positions do not cover exactly the graph's nodes.
    PositionsMismatch { code: IpcCode },
}

impl fmt::Display for LayoutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutError::InvalidParams { reason } => write!(f, "invalid layout params: {reason}"),
            LayoutError::PositionsMismatch { code } => {
                write!(f, "starting positions do not match graph at {code}")
            }
        }
    }
}

impl core::error::Error for LayoutError {}

impl LayoutParams {
    pub fn validate(&self) -> Result<(), LayoutError> {
        let bad = |reason| Err(LayoutError::InvalidParams { reason });
        if !(self.scaling.is_finite() && self.scaling > 0.0) {
            return bad("scaling must be finite and > 0");
        }
        if !(self.gravity.is_finite() && self.gravity >= 0.0) {
            return bad("gravity must be finite and >= 0");
        }
        if !(self.edge_weight_influence.is_finite() && self.edge_weight_influence >= 0.0) {
            return bad("edge_weight_influence must be finite and >= 0");
        }
        Ok(())
    }
}

/// Final node coordinates plus the parameters that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct LayoutPositions {
    positions: BTreeMap<IpcCode, (f64, f64)>,
    params: LayoutParams,
}

impl LayoutPositions {
    pub fn positions(&self) -> &BTreeMap<IpcCode, (f64, f64)> {
        &self.positions
    }

    pub fn get(&self, code: &IpcCode) -> Option<(f64, f64)> {
        self.positions.get(code).copied()
    }

    pub fn params_used(&self) -> &LayoutParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

fn next_unit_f64(rng: &mut impl RngCore) -> f64 {
    // Top 53 bits of the draw → uniform in [0, 1) at full double precision.
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seeded starting placement: uniform over a disc of radius √n centered on
/// the origin, drawn per node in canonical order.
pub fn initial_positions(
    network: &(impl IpcNetwork + ?Sized),
    params: &LayoutParams,
) -> BTreeMap<IpcCode, (f64, f64)> {
    let nodes = network.node_occurrences();
    let radius = libm::sqrt(nodes.len() as f64);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(params.seed);
    nodes
        .into_iter()
        .map(|(code, _)| {
            let r = radius * libm::sqrt(next_unit_f64(&mut rng));
            let theta = 2.0 * core::f64::consts::PI * next_unit_f64(&mut rng);
            (code.clone(), (r * libm::cos(theta), r * libm::sin(theta)))
        })
        .collect()
}

/// Run ForceAtlas2 from the seeded initial placement.
///
/// Total over all graphs: an empty graph yields empty positions. Invalid
/// parameters panic — validate with [`LayoutParams::validate`] first when
/// the values come from user input.
pub fn force_atlas2(network: &(impl IpcNetwork + ?Sized), params: &LayoutParams) -> LayoutPositions {
    let initial = initial_positions(network, params);
    force_atlas2_from(network, params, initial).expect("initial placement covers the node set")
}

/// Run ForceAtlas2 from caller-supplied starting positions, which must
/// cover exactly the graph's node set. This is the entry point for
/// reproducing a run or for testing force properties under controlled
/// (e.g. mirror-symmetric) configurations.
pub fn force_atlas2_from(
    network: &(impl IpcNetwork + ?Sized),
    params: &LayoutParams,
    initial: BTreeMap<IpcCode, (f64, f64)>,
) -> Result<LayoutPositions, LayoutError> {
    params.validate().and_then(|()| {
        let nodes = network.node_occurrences();
        for (code, _) in &nodes {
            if !initial.contains_key(code) {
                return Err(LayoutError::PositionsMismatch {
                    code: (*code).clone(),
                });
            }
        }
        if initial.len() != nodes.len() {
            let extra = initial
                .keys()
                .find(|code| !network.has_node(code))
                .expect("length mismatch implies an extra key");
            return Err(LayoutError::PositionsMismatch { code: extra.clone() });
        }
        Ok(())
    })?;

    let nodes = network.node_occurrences();
    let n = nodes.len();
    let index: BTreeMap<&IpcCode, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, (code, _))| (*code, i))
        .collect();
    let edges: Vec<(usize, usize, f64)> = network
        .weighted_edges()
        .into_iter()
        .map(|(s, t, similarity, _)| (index[s], index[t], similarity))
        .collect();
    let mut degree = vec![0usize; n];
    for &(u, v, _) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mass: Vec<f64> = degree.iter().map(|&d| (d + 1) as f64).collect();
    // Node radius for collision forces; grows with occurrence so heavily
    // used codes claim more canvas.
    let size: Vec<f64> = nodes
        .iter()
        .map(|&(_, occurrence)| 1.0 + libm::sqrt(occurrence as f64))
        .collect();

    let mut pos: Vec<(f64, f64)> = nodes.iter().map(|(code, _)| initial[code]).collect();
    let mut old_force = vec![(0.0f64, 0.0f64); n];
    let mut global_speed = 1.0f64;
    // Collision-aware final phase: last 10% of iterations (none if the run
    // is shorter than 10 iterations).
    let overlap_from = params.iterations - params.iterations / 10;

    for iteration in 0..params.iterations {
        let overlap_active = params.prevent_overlap && iteration >= overlap_from;
        let mut force = vec![(0.0f64, 0.0f64); n];

        // Repulsion between every pair, degree-weighted so hubs clear space.
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pos[i].0 - pos[j].0;
                let dy = pos[i].1 - pos[j].1;
                let dist = libm::sqrt(dx * dx + dy * dy);
                let (ux, uy) = if dist > 1e-12 {
                    (dx / dist, dy / dist)
                } else {
                    // Coincident nodes: push along a direction derived from
                    // the indices so the tie resolves the same way each run.
                    let angle = (i * 31 + j * 17) as f64;
                    (libm::cos(angle), libm::sin(angle))
                };
                let magnitude = if overlap_active {
                    let gap = dist - size[i] - size[j];
                    if gap > 1e-12 {
                        params.scaling * mass[i] * mass[j] / gap
                    } else {
                        // Flat shove while overlapping (no distance term).
                        100.0 * mass[i] * mass[j]
                    }
                } else if dist > 1e-12 {
                    params.scaling * mass[i] * mass[j] / dist
                } else {
                    params.scaling * mass[i] * mass[j]
                };
                force[i].0 += magnitude * ux;
                force[i].1 += magnitude * uy;
                force[j].0 -= magnitude * ux;
                force[j].1 -= magnitude * uy;
            }
        }

        // Attraction along edges, weighted by similarity^influence.
        for &(u, v, weight) in &edges {
            let dx = pos[u].0 - pos[v].0;
            let dy = pos[u].1 - pos[v].1;
            let dist = libm::sqrt(dx * dx + dy * dy);
            if dist <= 1e-12 {
                continue; // coincident: repulsion already separates them
            }
            let reach = if overlap_active {
                dist - size[u] - size[v]
            } else {
                dist
            };
            if reach <= 0.0 {
                continue; // touching nodes attract no further
            }
            let pull = libm::pow(weight, params.edge_weight_influence)
                * if params.linlog_mode {
                    libm::log1p(reach)
                } else {
                    reach
                };
            let (ux, uy) = (dx / dist, dy / dist);
            force[u].0 -= pull * ux;
            force[u].1 -= pull * uy;
            force[v].0 += pull * ux;
            force[v].1 += pull * uy;
        }

        // Constant gravity toward the origin keeps components from drifting
        // apart indefinitely.
        if params.gravity > 0.0 {
            for i in 0..n {
                let dist = libm::sqrt(pos[i].0 * pos[i].0 + pos[i].1 * pos[i].1);
                if dist > 1e-12 {
                    let pull = params.gravity * mass[i] / dist;
                    force[i].0 -= pull * pos[i].0;
                    force[i].1 -= pull * pos[i].1;
                }
            }
        }

        // Adaptive speed: swing (disagreement with the previous force) slows
        // a node down, traction (agreement) speeds the system up.
        let mut global_swing = 0.0f64;
        let mut global_traction = 0.0f64;
        let mut swings = vec![0.0f64; n];
        for i in 0..n {
            let sdx = force[i].0 - old_force[i].0;
            let sdy = force[i].1 - old_force[i].1;
            swings[i] = libm::sqrt(sdx * sdx + sdy * sdy);
            let tdx = force[i].0 + old_force[i].0;
            let tdy = force[i].1 + old_force[i].1;
            let traction = libm::sqrt(tdx * tdx + tdy * tdy) / 2.0;
            global_swing += mass[i] * swings[i];
            global_traction += mass[i] * traction;
        }
        let target_speed = if global_swing > 0.0 {
            global_traction / global_swing
        } else {
            global_speed * 1.5
        };
        // Never let the global speed grow by more than 50% per iteration.
        global_speed = target_speed.min(1.5 * global_speed);

        for i in 0..n {
            let local_speed = 0.1 * global_speed / (1.0 + global_speed * libm::sqrt(swings[i]));
            let magnitude = libm::sqrt(force[i].0 * force[i].0 + force[i].1 * force[i].1);
            // Displacement cap: no node may move more than 10 length units
            // in one step, however violent the force.
            let factor = if magnitude > 0.0 {
                local_speed.min(10.0 / magnitude)
            } else {
                local_speed
            };
            pos[i].0 += force[i].0 * factor;
            pos[i].1 += force[i].1 * factor;
        }
        old_force = force;
    }

    Ok(LayoutPositions {
        positions: nodes
            .iter()
            .enumerate()
            .map(|(i, (code, _))| ((*code).clone(), pos[i]))
            .collect(),
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CooccurrenceGraph;
    use crate::ipc::IpcLevel;

    fn code(text: &str) -> IpcCode {
        IpcCode::parse(text).unwrap()
    }

    /// Unit-weight section graph from an edge spec like "A-B B-C".
    fn sections(edge_spec: &str, extra_nodes: &str) -> CooccurrenceGraph {
        let mut nodes: BTreeMap<IpcCode, u32> = BTreeMap::new();
        let mut edges = Vec::new();
        for part in edge_spec.split_whitespace() {
            let (a, b) = part.split_once('-').unwrap();
            nodes.insert(code(a), 1);
            nodes.insert(code(b), 1);
            edges.push((code(a), code(b), 1));
        }
        for extra in extra_nodes.split_whitespace() {
            nodes.insert(code(extra), 1);
        }
        CooccurrenceGraph::from_counts(IpcLevel::Section, nodes, edges).unwrap()
    }

    fn params(iterations: u32) -> LayoutParams {
        LayoutParams {
            iterations,
            ..LayoutParams::default()
        }
    }

    #[test]
    fn zero_iterations_returns_seeded_placement() {
        let graph = sections("A-B B-C", "D");
        let layout = force_atlas2(&graph, &params(0));
        assert_eq!(layout.positions(), &initial_positions(&graph, &params(0)));
    }

    #[test]
    fn initial_placement_is_inside_the_disc_and_seeded() {
        let graph = sections("A-B B-C C-D D-E", "");
        let p = params(0);
        let placed = initial_positions(&graph, &p);
        let radius = libm::sqrt(placed.len() as f64);
        for &(x, y) in placed.values() {
            assert!(libm::sqrt(x * x + y * y) <= radius + 1e-9);
        }
        assert_eq!(placed, initial_positions(&graph, &p));
        let reseeded = LayoutParams { seed: 43, ..p };
        assert_ne!(placed, initial_positions(&graph, &reseeded));
    }

    #[test]
    fn identical_inputs_give_identical_layouts() {
        let graph = sections("A-B B-C C-A C-D", "E");
        let p = params(50);
        let first = force_atlas2(&graph, &p);
        let second = force_atlas2(&graph, &p);
        assert_eq!(first, second);
    }

    #[test]
    fn two_body_run_stays_mirror_symmetric() {
        let graph = sections("A-B", "");
        let start: BTreeMap<IpcCode, (f64, f64)> =
            [(code("A"), (0.7, 0.3)), (code("B"), (-0.7, -0.3))]
                .into_iter()
                .collect();
        let layout = force_atlas2_from(&graph, &params(200), start).unwrap();
        let (ax, ay) = layout.get(&code("A")).unwrap();
        let (bx, by) = layout.get(&code("B")).unwrap();
        assert!((ax + bx).abs() < 1e-6);
        assert!((ay + by).abs() < 1e-6);
        assert!(ax.is_finite() && ay.is_finite());
        assert!((ax, ay) != (bx, by)); // repulsion forbids coincidence
    }

    #[test]
    fn gravity_free_symmetric_step_keeps_the_centroid() {
        let graph = sections("A-B C-D A-C B-D", "");
        let start: BTreeMap<IpcCode, (f64, f64)> = [
            (code("A"), (1.0, 2.0)),
            (code("B"), (-1.0, -2.0)),
            (code("C"), (2.0, -1.0)),
            (code("D"), (-2.0, 1.0)),
        ]
        .into_iter()
        .collect();
        let p = LayoutParams {
            iterations: 1,
            gravity: 0.0,
            ..LayoutParams::default()
        };
        let layout = force_atlas2_from(&graph, &p, start).unwrap();
        let (mut cx, mut cy) = (0.0, 0.0);
        for &(x, y) in layout.positions().values() {
            cx += x;
            cy += y;
        }
        assert!(cx.abs() <= 1e-9);
        assert!(cy.abs() <= 1e-9);
    }

    #[test]
    fn long_runs_stay_bounded_and_separated() {
        let graph = sections("A-B B-C C-A C-D D-E", "F");
        let layout = force_atlas2(&graph, &params(500));
        for &(x, y) in layout.positions().values() {
            assert!(x.is_finite() && y.is_finite());
            assert!(x.abs() < 1e6 && y.abs() < 1e6);
        }
        let positions: Vec<_> = layout.positions().values().copied().collect();
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                assert_ne!(positions[i], positions[j]);
            }
        }
    }

    #[test]
    fn variant_modes_still_produce_finite_layouts() {
        let graph = sections("A-B B-C C-A", "");
        for (linlog, overlap, influence) in [
            (true, false, 1.0),
            (false, true, 0.0),
            (true, true, 2.0),
        ] {
            let p = LayoutParams {
                iterations: 120,
                linlog_mode: linlog,
                prevent_overlap: overlap,
                edge_weight_influence: influence,
                ..LayoutParams::default()
            };
            let layout = force_atlas2(&graph, &p);
            assert!(layout
                .positions()
                .values()
                .all(|&(x, y)| x.is_finite() && y.is_finite()));
        }
    }

    #[test]
    fn empty_graph_yields_empty_positions() {
        let graph = sections("", "");
        let layout = force_atlas2(&graph, &params(10));
        assert!(layout.is_empty());
    }

    #[test]
    fn single_node_gets_pulled_toward_the_origin() {
        let graph = sections("", "A");
        let start: BTreeMap<IpcCode, (f64, f64)> =
            [(code("A"), (3.0, 4.0))].into_iter().collect();
        let layout = force_atlas2_from(&graph, &params(100), start).unwrap();
        let (x, y) = layout.get(&code("A")).unwrap();
        assert!(libm::sqrt(x * x + y * y) < 5.0);
    }

    #[test]
    fn mismatched_starting_positions_are_rejected() {
        let graph = sections("A-B", "");
        let missing: BTreeMap<IpcCode, (f64, f64)> =
            [(code("A"), (0.0, 0.0))].into_iter().collect();
        assert!(matches!(
            force_atlas2_from(&graph, &params(1), missing),
            Err(LayoutError::PositionsMismatch { .. })
        ));
        let extra: BTreeMap<IpcCode, (f64, f64)> = [
            (code("A"), (0.0, 0.0)),
            (code("B"), (1.0, 0.0)),
            (code("C"), (2.0, 0.0)),
        ]
        .into_iter()
        .collect();
        assert!(matches!(
            force_atlas2_from(&graph, &params(1), extra),
            Err(LayoutError::PositionsMismatch { .. })
        ));
    }

    #[test]
    fn invalid_params_are_reported() {
        assert!(LayoutParams::default().validate().is_ok());
        let bad = LayoutParams {
            scaling: 0.0,
            ..LayoutParams::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(LayoutError::InvalidParams { .. })
        ));
        let negative_gravity = LayoutParams {
            gravity: -1.0,
            ..LayoutParams::default()
        };
        assert!(negative_gravity.validate().is_err());
    }
}
