//! Property tests for the layout: totality (every node placed, all
//! coordinates finite) and bit-level determinism on random graphs.

use std::collections::BTreeMap;

use ipcmap_core::graph::CooccurrenceGraph;
use ipcmap_core::layout::{force_atlas2, initial_positions, LayoutParams};
use ipcmap_core::{IpcCode, IpcLevel};
use proptest::prelude::*;

fn nth_code(i: usize) -> IpcCode {
    let section = [b'A', b'B', b'C', b'D', b'E', b'F', b'G', b'H'][i / 12] as char;
    let subclass = (b'A' + (i % 26) as u8) as char;
    IpcCode::parse(&format!("{section}{:02}{subclass}", (i % 99) + 1)).unwrap()
}

fn pair_from_rank(n: usize, rank: usize) -> (usize, usize) {
    let mut k = rank;
    for i in 0..n {
        let fan_out = n - i - 1;
        if k < fan_out {
            return (i, i + 1 + k);
        }
        k -= fan_out;
    }
    unreachable!("rank within n*(n-1)/2");
}

fn arb_graph() -> impl Strategy<Value = CooccurrenceGraph> {
    (1usize..=10).prop_flat_map(|n| {
        let max_pairs = n * (n - 1) / 2;
        let ranks = if max_pairs == 0 {
            Just(std::collections::BTreeSet::new()).boxed()
        } else {
            prop::collection::btree_set(0..max_pairs, 0..=max_pairs).boxed()
        };
        ranks.prop_map(move |ranks| {
            let nodes: BTreeMap<IpcCode, u32> =
                (0..n).map(|i| (nth_code(i), 1 + i as u32)).collect();
            CooccurrenceGraph::from_counts(
                IpcLevel::Subclass,
                nodes,
                ranks.into_iter().map(|rank| {
                    let (u, v) = pair_from_rank(n, rank);
                    (nth_code(u), nth_code(v), 1)
                }),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_node_is_placed_finitely(
        graph in arb_graph(),
        iterations in 0u32..40,
        seed in any::<u64>(),
        linlog in any::<bool>(),
        overlap in any::<bool>(),
    ) {
        let params = LayoutParams {
            iterations,
            linlog_mode: linlog,
            prevent_overlap: overlap,
            seed,
            ..LayoutParams::default()
        };
        let layout = force_atlas2(&graph, &params);
        prop_assert_eq!(layout.len(), graph.node_count());
        for code in graph.nodes().keys() {
            let (x, y) = layout.get(code).expect("every node placed");
            prop_assert!(x.is_finite() && y.is_finite());
        }
    }

    #[test]
    fn layouts_are_bit_reproducible(graph in arb_graph(), seed in any::<u64>()) {
        let params = LayoutParams { iterations: 25, seed, ..LayoutParams::default() };
        prop_assert_eq!(force_atlas2(&graph, &params), force_atlas2(&graph, &params));
    }

    #[test]
    fn zero_iterations_is_the_seeded_placement(graph in arb_graph(), seed in any::<u64>()) {
        let params = LayoutParams { iterations: 0, seed, ..LayoutParams::default() };
        let layout = force_atlas2(&graph, &params);
        prop_assert_eq!(layout.positions(), &initial_positions(&graph, &params));
    }
}
