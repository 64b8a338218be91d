//! Named graph families and seeded random ensembles.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{OrientedGraph, VertexSetPartition};
use crate::seed::{derive_seed, rng};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("n = {0} must be a multiple of 3 and at least 9")]
    BadN(usize),
    #[error("no sample with minimum semidegree >= {min_semidegree} after {tries} tries")]
    Exhausted { min_semidegree: usize, tries: usize },
}

/// Part sizes of the tightness construction on `n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub n: usize,
    pub w: [usize; 3],
    pub u1: usize,
    pub u2: usize,
}

impl ExtremalSpec {
    pub fn new(n: usize) -> Result<Self, GenError> {
        if !n.is_multiple_of(3) || n < 9 {
            return Err(GenError::BadN(n));
        }
        let third = 2 * n / 3;
        let w = [(third + 1) / 3, third.div_ceil(3), (third + 3) / 3];
        let u1 = (n - 3) / 6;
        let u2 = (n - 3).div_ceil(6);
        Ok(Self { n, w, u1, u2 })
    }

    /// `(|W1|, |W2|, |W3|, |U1|, |U2|)`.
    pub fn sizes(&self) -> [usize; 5] {
        [self.w[0], self.w[1], self.w[2], self.u1, self.u2]
    }

    /// `⌊7n/18⌋ − 1`.
    pub fn floor_bound(&self) -> usize {
        7 * self.n / 18 - 1
    }

    /// `⌈7n/18⌉ − 1`, the largest integer strictly below `7n/18`.
    pub fn below_threshold(&self) -> usize {
        (7 * self.n).div_ceil(18) - 1
    }

    /// `⌊2n/9⌋ + ⌊(n−3)/6⌋ + 1`.
    pub fn introduction_formula(&self) -> usize {
        2 * self.n / 9 + (self.n - 3) / 6 + 1
    }
}

fn consecutive_blocks(names: &[&str], sizes: &[usize]) -> Vec<(String, Vec<usize>)> {
    let mut start = 0;
    names
        .iter()
        .zip(sizes)
        .map(|(name, &len)| {
            let block = (start..start + len).collect();
            start += len;
            (name.to_string(), block)
        })
        .collect()
}

fn connect_all(g: &mut OrientedGraph, from: &[usize], to: &[usize]) {
    for &u in from {
        for &v in to {
            g.add_arc(u, v).expect("blocks are disjoint");
        }
    }
}

/// Tightness construction: `W1, W2, W3, U1, U2` as consecutive id ranges with
/// all arcs `Wi -> Wi+1`, `U1 -> U2`, `W1 ∪ W2 -> U1`, `U1 -> W3`,
/// `U2 -> W1 ∪ W2` and `W3 -> U2`.
pub fn extremal_graph(n: usize) -> Result<(OrientedGraph, VertexSetPartition), GenError> {
    let spec = ExtremalSpec::new(n)?;
    let blocks = consecutive_blocks(&["W1", "W2", "W3", "U1", "U2"], &spec.sizes());
    let [w1, w2, w3, u1, u2] = [0, 1, 2, 3, 4].map(|i| blocks[i].1.clone());
    let mut g = OrientedGraph::new(n);
    connect_all(&mut g, &w1, &w2);
    connect_all(&mut g, &w2, &w3);
    connect_all(&mut g, &w3, &w1);
    connect_all(&mut g, &u1, &u2);
    connect_all(&mut g, &w1, &u1);
    connect_all(&mut g, &w2, &u1);
    connect_all(&mut g, &u1, &w3);
    connect_all(&mut g, &u2, &w1);
    connect_all(&mut g, &u2, &w2);
    connect_all(&mut g, &w3, &u2);
    let partition = VertexSetPartition::new(n, blocks).expect("consecutive blocks are disjoint");
    Ok((g, partition))
}

/// Blow-up of a cyclic triangle with `|Wi| = ⌊(n+i−1)/3⌋`.
pub fn cyclic_blowup(n: usize) -> (OrientedGraph, VertexSetPartition) {
    let sizes = [n / 3, (n + 1) / 3, n.div_ceil(3)];
    let blocks = consecutive_blocks(&["W1", "W2", "W3"], &sizes);
    let mut g = OrientedGraph::new(n);
    for i in 0..3 {
        connect_all(&mut g, &blocks[i].1, &blocks[(i + 1) % 3].1);
    }
    let partition = VertexSetPartition::new(n, blocks).expect("consecutive blocks are disjoint");
    (g, partition)
}

/// A member of the family used by the final completion step: `n = 18m`,
/// cyclic blow-up on `W = W1 ∪ W2 ∪ W3` (`4m` each), independent `U` (`6m`)
/// and `d⁺(w, U) = d⁻(w, U) = 3m` for every `w ∈ W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFamilySpec {
    pub m: usize,
    pub n: usize,
    pub partition: VertexSetPartition,
}

impl CFamilySpec {
    pub fn w_parts(&self) -> [&[usize]; 3] {
        ["W1", "W2", "W3"].map(|name| self.partition.block(name).expect("W blocks present"))
    }

    pub fn u(&self) -> &[usize] {
        self.partition.block("U").expect("U block present")
    }
}

/// Builds a `CFamilySpec` graph. `W`-vertex `j` (in id order) points to the
/// `U`-slots `j, j+1, …, j+3m−1 (mod 6m)` and receives arcs from the rest; the
/// seed permutes which `U` vertex occupies which slot.
pub fn c_family_graph(m: usize, seed: u64) -> (OrientedGraph, CFamilySpec) {
    assert!(m >= 1, "m must be positive");
    let n = 18 * m;
    let blocks = consecutive_blocks(&["W1", "W2", "W3", "U"], &[4 * m, 4 * m, 4 * m, 6 * m]);
    let mut g = OrientedGraph::new(n);
    for i in 0..3 {
        connect_all(&mut g, &blocks[i].1, &blocks[(i + 1) % 3].1);
    }
    let mut slots = blocks[3].1.clone();
    slots.shuffle(&mut rng(seed));
    let u_len = 6 * m;
    for j in 0..12 * m {
        for (k, &u) in slots.iter().enumerate() {
            if (k + u_len - j % u_len) % u_len < 3 * m {
                g.add_arc(j, u).expect("fresh pair");
            } else {
                g.add_arc(u, j).expect("fresh pair");
            }
        }
    }
    let partition = VertexSetPartition::new(n, blocks).expect("consecutive blocks are disjoint");
    (g, CFamilySpec { m, n, partition })
}

/// Independently per unordered pair: `u -> v` with probability `arc_prob/2`,
/// `v -> u` with probability `arc_prob/2`, absent otherwise.
pub fn random_oriented_graph(n: usize, arc_prob: f64, seed: u64) -> OrientedGraph {
    assert!((0.0..=1.0).contains(&arc_prob), "arc_prob must lie in [0, 1]");
    let mut r = rng(seed);
    let mut g = OrientedGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let x: f64 = r.random();
            if x < arc_prob / 2.0 {
                g.add_arc(u, v).expect("fresh pair");
            } else if x < arc_prob {
                g.add_arc(v, u).expect("fresh pair");
            }
        }
    }
    g
}

/// Random oriented graph with `δ⁰ ≥ d`. Attempt `i` draws a tournament from
/// `derive_seed(seed, i)`, reverses arcs from vertices with surplus towards
/// deficient ones (each reversal lowers the total deficit), then deletes a
/// random fraction (below 0.15) of arcs, skipping deletions that would break
/// the bound. Not uniform over the target class.
pub fn random_with_min_semidegree(n: usize, d: usize, seed: u64, max_tries: usize) -> Result<OrientedGraph, GenError> {
    if n == 0 || 2 * d > n - 1 {
        return Err(GenError::Exhausted { min_semidegree: d, tries: 0 });
    }
    for attempt in 0..max_tries {
        let s = derive_seed(seed, attempt as u64);
        let mut g = random_oriented_graph(n, 1.0, s);
        let mut r = rng(derive_seed(s, 1));
        if !repair_tournament(&mut g, d, &mut r) {
            continue;
        }
        let q: f64 = r.random_range(0.0..0.15);
        let mut arcs: Vec<(usize, usize)> = g.arcs().collect();
        arcs.shuffle(&mut r);
        for (u, v) in arcs {
            if r.random_bool(q) && g.out_degree(u) > d && g.in_degree(v) > d {
                g.remove_arc(u, v);
            }
        }
        debug_assert!(g.min_semidegree() >= d);
        return Ok(g);
    }
    Err(GenError::Exhausted { min_semidegree: d, tries: max_tries })
}

/// In a tournament with `2d ≤ n − 1`, `δ⁰ ≥ d` iff every out-degree lies in
/// `[d, n − 1 − d]`.
fn repair_tournament(g: &mut OrientedGraph, d: usize, r: &mut crate::seed::Rng) -> bool {
    let n = g.vertex_count();
    let hi = n - 1 - d;
    loop {
        let Some(v) = (0..n).find(|&v| g.out_degree(v) < d || g.out_degree(v) > hi) else {
            return true;
        };
        let (candidates, towards_v): (Vec<usize>, bool) = if g.out_degree(v) < d {
            (g.in_neighbors(v).ones().filter(|&w| g.out_degree(w) > d).collect(), true)
        } else {
            (g.out_neighbors(v).ones().filter(|&w| g.out_degree(w) < hi).collect(), false)
        };
        let Some(&w) = candidates.choose(r) else {
            return false;
        };
        if towards_v {
            g.remove_arc(w, v);
            g.add_arc(v, w).expect("pair just cleared");
        } else {
            g.remove_arc(v, w);
            g.add_arc(w, v).expect("pair just cleared");
        }
    }
}

/// Deletes arcs in seeded random order, skipping any arc whose removal would
/// make an endpoint lose more than `per_vertex_budget` arcs.
pub fn perturb(g: &OrientedGraph, per_vertex_budget: usize, seed: u64) -> OrientedGraph {
    let mut result = g.clone();
    if per_vertex_budget == 0 {
        return result;
    }
    let mut arcs: Vec<(usize, usize)> = g.arcs().collect();
    arcs.shuffle(&mut rng(seed));
    let mut lost = vec![0usize; g.vertex_count()];
    for (u, v) in arcs {
        if lost[u] < per_vertex_budget && lost[v] < per_vertex_budget {
            result.remove_arc(u, v);
            lost[u] += 1;
            lost[v] += 1;
        }
    }
    result
}

/// Cyclic blow-up with parts of the given sizes plus a block `U` whose
/// vertices are adjacent to every `W` vertex (orientation a fair coin) and to
/// each other with probability `u_arc_prob`. Blocks: `W1, W2, W3, U`.
pub fn near_extremal_graph(
    w_sizes: [usize; 3],
    u_size: usize,
    u_arc_prob: f64,
    seed: u64,
) -> (OrientedGraph, VertexSetPartition) {
    let n = w_sizes.iter().sum::<usize>() + u_size;
    let blocks = consecutive_blocks(&["W1", "W2", "W3", "U"], &[w_sizes[0], w_sizes[1], w_sizes[2], u_size]);
    let mut g = OrientedGraph::new(n);
    for i in 0..3 {
        connect_all(&mut g, &blocks[i].1, &blocks[(i + 1) % 3].1);
    }
    let mut r = rng(seed);
    let u = &blocks[3].1;
    for &x in u {
        for w in 0..n - u_size {
            if r.random_bool(0.5) {
                g.add_arc(w, x).expect("fresh pair");
            } else {
                g.add_arc(x, w).expect("fresh pair");
            }
        }
    }
    for (i, &a) in u.iter().enumerate() {
        for &b in &u[i + 1..] {
            if r.random_bool(u_arc_prob) {
                let (s, t) = if r.random_bool(0.5) { (a, b) } else { (b, a) };
                g.add_arc(s, t).expect("fresh pair");
            }
        }
    }
    let partition = VertexSetPartition::new(n, blocks).expect("consecutive blocks are disjoint");
    (g, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vertex_mask;

    #[test]
    fn extremal_sizes_and_semidegree() {
        let (g, p) = extremal_graph(18).unwrap();
        assert_eq!(p.sizes(), vec![4, 4, 5, 2, 3]);
        assert_eq!(g.min_semidegree(), 6);
        // A W3 vertex has indegree |W2| + |U1|.
        let w3 = p.block("W3").unwrap()[0];
        assert_eq!(g.in_degree(w3), 6);
        let spec = ExtremalSpec::new(9).unwrap();
        assert_eq!(spec.sizes(), [2, 2, 3, 1, 1]);
        assert_eq!(extremal_graph(20).unwrap_err(), GenError::BadN(20));
        assert_eq!(extremal_graph(6).unwrap_err(), GenError::BadN(6));
    }

    #[test]
    fn extremal_triangles_meet_u() {
        let (g, p) = extremal_graph(18).unwrap();
        let u = vertex_mask(18, &[p.block("U1").unwrap(), p.block("U2").unwrap()].concat());
        let tts = g.transitive_triangles();
        assert!(!tts.is_empty());
        assert!(tts.iter().all(|t| t.vertices().iter().any(|&v| u.contains(v))));
    }

    #[test]
    fn extremal_w_part_is_cyclic_blowup() {
        let (g, p) = extremal_graph(18).unwrap();
        let w: Vec<usize> = ["W1", "W2", "W3"].iter().flat_map(|b| p.block(b).unwrap().to_vec()).collect();
        let (sub, _) = g.induced(&w).unwrap();
        assert_eq!(sub.cyclic_triangles().len(), 4 * 4 * 5);
        assert_eq!(sub.count_transitive_triangles(), 0);
    }

    #[test]
    fn cyclic_blowup_cases() {
        let (g3, _) = cyclic_blowup(3);
        assert_eq!(g3, OrientedGraph::directed_cycle(3));
        let (g, p) = cyclic_blowup(12);
        assert_eq!(p.sizes(), vec![4, 4, 4]);
        assert_eq!(g.count_transitive_triangles(), 0);
        assert_eq!(g.min_semidegree(), 4);
    }

    #[test]
    fn c_family_invariants() {
        for m in 1..=3 {
            let (g, spec) = c_family_graph(m, 11);
            let u = vertex_mask(g.vertex_count(), spec.u());
            assert_eq!(g.arcs_within(&u), 0);
            for part in spec.w_parts() {
                for &w in part {
                    assert_eq!(g.out_degree_into(w, &u), 3 * m);
                    assert_eq!(g.in_degree_into(w, &u), 3 * m);
                }
            }
            let w: Vec<usize> = spec.w_parts().concat();
            assert_eq!(g.arcs_within(&vertex_mask(g.vertex_count(), &w)), 3 * 16 * m * m);
        }
        assert_eq!(c_family_graph(2, 5).0, c_family_graph(2, 5).0);
    }

    #[test]
    fn random_graph_extremes_and_determinism() {
        let t = random_oriented_graph(10, 1.0, 3);
        assert_eq!(t.arc_count(), 45);
        assert_eq!(random_oriented_graph(10, 0.0, 3).arc_count(), 0);
        assert_eq!(random_oriented_graph(10, 0.5, 9), random_oriented_graph(10, 0.5, 9));
    }

    #[test]
    fn min_semidegree_sampling() {
        let g = random_with_min_semidegree(7, 0, 1, 1).unwrap();
        assert_eq!(g, random_with_min_semidegree(7, 0, 1, 1).unwrap());
        for (n, s) in [(21usize, 0u64), (45, 1), (90, 2)] {
            let d = (7 * n).div_ceil(18);
            assert!(random_with_min_semidegree(n, d, s, 1).unwrap().min_semidegree() >= d);
        }
        let regular = random_with_min_semidegree(9, 4, 2, 1_000_000).unwrap();
        assert!((0..9).all(|v| regular.out_degree(v) == 4 && regular.in_degree(v) == 4));
        assert!(matches!(random_with_min_semidegree(6, 3, 0, 10), Err(GenError::Exhausted { .. })));
    }

    #[test]
    fn perturbation_respects_budget() {
        let (g, _) = c_family_graph(2, 0);
        assert_eq!(perturb(&g, 0, 1), g);
        for budget in 1..4 {
            let h = perturb(&g, budget, 7);
            for v in 0..g.vertex_count() {
                let lost = g.degree(v) - h.degree(v);
                assert!(lost <= budget);
            }
            assert!(h.arcs().all(|(u, v)| g.has_arc(u, v)));
        }
    }
}
