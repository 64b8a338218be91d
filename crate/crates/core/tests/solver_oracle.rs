use proptest::prelude::*;

use tt3_core::exact::{find_perfect_tiling, max_tiling, SolveBudget, SolveStatus};
use tt3_core::generators::random_oriented_graph;
use tt3_core::matching::{max_matching, UndirectedGraph};
use tt3_core::OrientedGraph;

fn transitive(g: &OrientedGraph, a: usize, b: usize, c: usize) -> bool {
    [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
        .iter()
        .any(|&(s, m, t)| g.has_arc(s, m) && g.has_arc(m, t) && g.has_arc(s, t))
}

fn packing(g: &OrientedGraph, free: u32) -> usize {
    if free == 0 {
        return 0;
    }
    let v = free.trailing_zeros() as usize;
    let rest = free & !(1 << v);
    let mut best = packing(g, rest);
    let n = g.vertex_count();
    for a in v + 1..n {
        for c in a + 1..n {
            if rest >> a & 1 == 1 && rest >> c & 1 == 1 && transitive(g, v, a, c) {
                best = best.max(1 + packing(g, rest & !(1 << a) & !(1 << c)));
            }
        }
    }
    best
}

fn matching_number(h: &UndirectedGraph, free: u32) -> usize {
    if free == 0 {
        return 0;
    }
    let v = free.trailing_zeros() as usize;
    let rest = free & !(1 << v);
    let mut best = matching_number(h, rest);
    for &w in h.neighbors(v) {
        if rest >> w & 1 == 1 {
            best = best.max(1 + matching_number(h, rest & !(1 << w)));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_matches_enumeration(n in 0usize..=10, p in 0.3f64..=1.0, seed in any::<u64>()) {
        let g = random_oriented_graph(n, p, seed);
        let best = packing(&g, (1u32 << n) - 1);
        let out = max_tiling(&g, SolveBudget::unlimited());
        prop_assert!(out.optimal);
        prop_assert!(g.check_tiling(&out.tiling).is_ok());
        prop_assert_eq!(out.tiling.len(), best);
        let perfect = find_perfect_tiling(&g, SolveBudget::unlimited());
        match perfect.status {
            SolveStatus::Tiling(t) => {
                prop_assert_eq!(3 * t.len(), n);
                prop_assert!(g.check_tiling(&t).is_ok());
            }
            SolveStatus::NoTiling => prop_assert!(n % 3 != 0 || 3 * best < n),
            SolveStatus::BudgetExceeded => prop_assert!(false, "unlimited budget exceeded"),
        }
    }

    #[test]
    fn blossom_is_maximum(n in 0usize..=12, edges in prop::collection::vec((0usize..12, 0usize..12), 0..40)) {
        let edges: Vec<_> = edges.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
        let h = UndirectedGraph::from_edges(n, edges);
        let m = max_matching(&h);
        prop_assert!(m.is_valid_in(&h));
        prop_assert_eq!(m.len(), matching_number(&h, (1u32 << n) - 1));
    }
}
