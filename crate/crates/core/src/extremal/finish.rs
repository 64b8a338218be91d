//! Completion of a perfect tiling on graphs close to the balanced family:
//! three perfect matchings between halves of the parts, then a perfect
//! matching of `U` into those edges.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{OrientedGraph, Tiling};
use crate::matching::{hall_perfect_matching, random_equitable_split, BipartiteGraph, HallOutcome};
use crate::par::{find_first, Execution};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinishDiagnostic {
    pub retry: usize,
    /// `"G1"`, `"G2"`, `"G3"` or `"B"`.
    pub graph: String,
    /// A Hall-violating set, in host vertex ids for `B` (left side = `U`).
    pub hall_set: Vec<usize>,
    pub neighborhood_size: usize,
    /// The `U` vertex with fewest completing edges and that count.
    pub weakest: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum FinishError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no perfect tiling after {retries} retries; first retry stalled in {}", diagnostic.graph)]
    FinishFailed { retries: usize, diagnostic: FinishDiagnostic },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinishReport {
    pub tiling: Tiling,
    /// Index of the retry that succeeded.
    pub retry: usize,
}

fn bipartite_on(g: &OrientedGraph, left: &[usize], right: &[usize], seed: u64) -> BipartiteGraph {
    let mut b = BipartiteGraph::new(left.len(), right.len());
    for (i, &x) in left.iter().enumerate() {
        for (j, &y) in right.iter().enumerate() {
            if g.adjacent(x, y) {
                b.add_edge(i, j);
            }
        }
    }
    b.shuffle(seed);
    b
}

fn attempt(g: &OrientedGraph, parts: &[Vec<usize>; 3], u: &[usize], seed: u64, retry: usize) -> Result<Tiling, FinishDiagnostic> {
    let halves: Vec<(Vec<usize>, Vec<usize>)> =
        (0..3).map(|i| random_equitable_split(&parts[i], derive_seed(seed, i as u64))).collect();
    let pairs = [(&halves[0].0, &halves[1].0), (&halves[1].1, &halves[2].1), (&halves[2].0, &halves[0].1)];
    let mut edges = Vec::with_capacity(u.len());
    for (k, (a, b)) in pairs.into_iter().enumerate() {
        let bg = bipartite_on(g, a, b, derive_seed(seed, 3 + k as u64));
        match hall_perfect_matching(&bg).expect("halves of equal parts") {
            HallOutcome::Perfect(m) => edges.extend(m.pairs.iter().map(|&(x, y)| (a[x], b[y]))),
            HallOutcome::Violation { set, neighborhood } => {
                return Err(FinishDiagnostic {
                    retry,
                    graph: format!("G{}", k + 1),
                    hall_set: set.iter().map(|&x| a[x]).collect(),
                    neighborhood_size: neighborhood.len(),
                    weakest: None,
                })
            }
        }
    }
    let mut bu = BipartiteGraph::new(u.len(), edges.len());
    for (i, &x) in u.iter().enumerate() {
        for (j, &(a, b)) in edges.iter().enumerate() {
            if g.transitive_triple(x, a, b).is_some() {
                bu.add_edge(i, j);
            }
        }
    }
    bu.shuffle(derive_seed(seed, 6));
    match hall_perfect_matching(&bu).expect("|U| equals the number of edges") {
        HallOutcome::Perfect(m) => Ok(Tiling::new(
            m.pairs
                .iter()
                .map(|&(i, j)| g.transitive_triple(u[i], edges[j].0, edges[j].1).expect("edge of B"))
                .collect(),
        )),
        HallOutcome::Violation { set, neighborhood } => {
            let weakest = (0..u.len()).min_by_key(|&i| (bu.left_degree(i), i)).map(|i| (u[i], bu.left_degree(i)));
            Err(FinishDiagnostic {
                retry,
                graph: "B".into(),
                hall_set: set.iter().map(|&i| u[i]).collect(),
                neighborhood_size: neighborhood.len(),
                weakest,
            })
        }
    }
}

/// Perfect tiling of `parts ∪ u` where the parts have equal size `4k` and
/// `|u| = 6k`. Retry `r` uses seed `derive_seed(seed, r)`; the lowest
/// successful retry wins regardless of execution order.
pub fn finish_tiling(
    g: &OrientedGraph,
    parts: &[Vec<usize>; 3],
    u: &[usize],
    seed: u64,
    retries: usize,
    exec: Execution,
) -> Result<FinishReport, FinishError> {
    let s = parts[0].len();
    if parts.iter().any(|p| p.len() != s) {
        return Err(FinishError::Precondition(format!(
            "part sizes differ: {:?}",
            parts.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let total = 3 * s + u.len();
    if !total.is_multiple_of(18) || 2 * u.len() != 3 * s {
        return Err(FinishError::Precondition(format!("|W_i| = {s}, |U| = {}: need 18 | n and |U| = 3|W_i|/2", u.len())));
    }
    if retries == 0 {
        return Err(FinishError::Precondition("retries must be positive".into()));
    }
    match find_first(exec, retries, |r| attempt(g, parts, u, derive_seed(seed, r as u64), r).ok()) {
        Some((retry, tiling)) => Ok(FinishReport { tiling, retry }),
        None => {
            let diagnostic = attempt(g, parts, u, derive_seed(seed, 0), 0).expect_err("retry 0 failed before");
            Err(FinishError::FinishFailed { retries, diagnostic })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::c_family_graph;

    fn split(spec: &crate::generators::CFamilySpec) -> ([Vec<usize>; 3], Vec<usize>) {
        (spec.w_parts().map(|p| p.to_vec()), spec.u().to_vec())
    }

    #[test]
    fn family_members_tile() {
        for m in 1..=4 {
            let (g, spec) = c_family_graph(m, m as u64);
            let (parts, u) = split(&spec);
            let report = finish_tiling(&g, &parts, &u, 7, 32, Execution::Sequential).unwrap();
            assert!(g.check_tiling(&report.tiling).unwrap().perfect);
        }
    }

    #[test]
    fn execution_modes_agree() {
        let (g, spec) = c_family_graph(3, 9);
        let (parts, u) = split(&spec);
        let a = finish_tiling(&g, &parts, &u, 1, 16, Execution::Sequential).unwrap();
        let b = finish_tiling(&g, &parts, &u, 1, 16, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn preconditions() {
        let (g, spec) = c_family_graph(1, 0);
        let (parts, u) = split(&spec);
        assert!(matches!(
            finish_tiling(&g, &parts, &u[..5], 0, 4, Execution::Sequential),
            Err(FinishError::Precondition(_))
        ));
        let short = [parts[0][..3].to_vec(), parts[1].clone(), parts[2].clone()];
        assert!(matches!(finish_tiling(&g, &short, &u, 0, 4, Execution::Sequential), Err(FinishError::Precondition(_))));
    }

    #[test]
    fn isolated_u_vertex_is_named() {
        let (mut g, spec) = c_family_graph(2, 3);
        let (parts, u) = split(&spec);
        let x = u[2];
        for w in 0..24 {
            g.remove_arc(w, x);
            g.remove_arc(x, w);
        }
        let err = finish_tiling(&g, &parts, &u, 0, 8, Execution::Sequential).unwrap_err();
        let FinishError::FinishFailed { diagnostic, .. } = err else { panic!("{err:?}") };
        assert_eq!(diagnostic.graph, "B");
        assert_eq!(diagnostic.weakest, Some((x, 0)));
    }
}
