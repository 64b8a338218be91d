//! Matching primitives: maximum matching in general graphs (Edmonds'
//! blossom algorithm), Hopcroft–Karp for bipartite graphs with a Hall-violator
//! certificate on failure, and random equitable splits.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::OrientedGraph;
use crate::seed::rng;

/// Simple undirected graph as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<usize>>,
}

impl UndirectedGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u != v && u < n && v < n, "invalid edge {u}-{v}");
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { adj }
    }

    /// Underlying undirected graph of `g[vertices]`, relabelled `0..len`.
    pub fn underlying(g: &OrientedGraph, vertices: &[usize]) -> Self {
        let mut edges = Vec::new();
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if g.adjacent(a, b) {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(vertices.len(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Endpoints pairwise distinct and every pair an edge of `graph`.
    pub fn is_valid_in(&self, graph: &UndirectedGraph) -> bool {
        let mut used = vec![false; graph.vertex_count()];
        self.pairs.iter().all(|&(u, v)| {
            let ok = u < used.len() && v < used.len() && graph.has_edge(u, v) && !used[u] && !used[v] && u != v;
            if ok {
                used[u] = true;
                used[v] = true;
            }
            ok
        })
    }
}

/// Maximum-cardinality matching via Edmonds' blossom algorithm.
pub fn max_matching(graph: &UndirectedGraph) -> Matching {
    let n = graph.vertex_count();
    let mut mate = vec![usize::MAX; n];
    // Greedy warm start.
    for u in 0..n {
        if mate[u] == usize::MAX {
            if let Some(&v) = graph.neighbors(u).iter().find(|&&v| mate[v] == usize::MAX) {
                mate[u] = v;
                mate[v] = u;
            }
        }
    }
    let mut blossom = Blossom::new(n);
    for root in 0..n {
        if mate[root] == usize::MAX {
            if let Some(end) = blossom.find_path(graph, &mate, root) {
                let mut v = end;
                while v != usize::MAX {
                    let pv = blossom.parent[v];
                    let next = mate[pv];
                    mate[v] = pv;
                    mate[pv] = v;
                    v = next;
                }
            }
        }
    }
    let pairs = (0..n).filter(|&u| mate[u] != usize::MAX && u < mate[u]).map(|u| (u, mate[u])).collect();
    Matching { pairs }
}

struct Blossom {
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom {
    fn new(n: usize) -> Self {
        Self {
            parent: vec![usize::MAX; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mate: &[usize], mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if mate[a] == usize::MAX {
                break;
            }
            a = self.parent[mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[mate[b]];
        }
    }

    fn mark_path(&mut self, mate: &[usize], mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[mate[v]]] = true;
            self.parent[v] = child;
            child = mate[v];
            v = self.parent[mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, graph: &UndirectedGraph, mate: &[usize], root: usize) -> Option<usize> {
        let n = mate.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = usize::MAX);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in graph.neighbors(v) {
                if self.base[v] == self.base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != usize::MAX && self.parent[mate[to]] != usize::MAX) {
                    let cur = self.lca(mate, v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == usize::MAX {
                    self.parent[to] = v;
                    if mate[to] == usize::MAX {
                        return Some(to);
                    }
                    self.used[mate[to]] = true;
                    self.queue.push_back(mate[to]);
                }
            }
        }
        None
    }
}

/// Bipartite graph with left vertices `0..left` and right vertices `0..right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        Self { left, right, adj: vec![Vec::new(); left] }
    }

    pub fn add_edge(&mut self, x: usize, y: usize) {
        assert!(x < self.left && y < self.right, "edge ({x}, {y}) out of range");
        self.adj[x].push(y);
    }

    pub fn left_degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right];
        for list in &self.adj {
            for &y in list {
                deg[y] += 1;
            }
        }
        deg
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[x].contains(&y)
    }

    /// Randomizes adjacency order so matchers return seed-dependent matchings.
    pub fn shuffle(&mut self, seed: u64) {
        let mut r = rng(seed);
        for list in &mut self.adj {
            list.shuffle(&mut r);
        }
    }
}

/// Hopcroft–Karp. Returns `mate_left[x] = Some(y)` for matched left vertices.
pub fn bipartite_max_matching(b: &BipartiteGraph) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let mut mate_l = vec![FREE; b.left];
    let mut mate_r = vec![FREE; b.right];
    let mut dist = vec![0usize; b.left];
    loop {
        let mut queue = VecDeque::new();
        for x in 0..b.left {
            if mate_l[x] == FREE {
                dist[x] = 0;
                queue.push_back(x);
            } else {
                dist[x] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for &y in &b.adj[x] {
                let x2 = mate_r[y];
                if x2 == FREE {
                    found = true;
                } else if dist[x2] == usize::MAX {
                    dist[x2] = dist[x] + 1;
                    queue.push_back(x2);
                }
            }
        }
        if !found {
            break;
        }
        let mut progress = false;
        for x in 0..b.left {
            if mate_l[x] == FREE && augment(b, x, &mut mate_l, &mut mate_r, &mut dist) {
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    mate_l.into_iter().map(|y| (y != FREE).then_some(y)).collect()
}

fn augment(b: &BipartiteGraph, x: usize, mate_l: &mut [usize], mate_r: &mut [usize], dist: &mut [usize]) -> bool {
    for i in 0..b.adj[x].len() {
        let y = b.adj[x][i];
        let x2 = mate_r[y];
        if x2 == usize::MAX || (dist[x2] == dist[x] + 1 && augment(b, x2, mate_l, mate_r, dist)) {
            mate_l[x] = y;
            mate_r[y] = x;
            return true;
        }
    }
    dist[x] = usize::MAX;
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("sides differ in size: |X| = {left}, |Y| = {right}")]
    SizeMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HallOutcome {
    /// Pairs `(x, y)` covering both sides.
    Perfect(Matching),
    /// `X' ⊆ X` with `|N(X')| < |X'|`.
    Violation { set: Vec<usize>, neighborhood: Vec<usize> },
}

/// Perfect matching of an `(X, Y)`-bipartite graph with `|X| = |Y|`, or a
/// Hall-violating subset of `X` read off the alternating forest.
pub fn hall_perfect_matching(b: &BipartiteGraph) -> Result<HallOutcome, MatchingError> {
    if b.left != b.right {
        return Err(MatchingError::SizeMismatch { left: b.left, right: b.right });
    }
    let mate_l = bipartite_max_matching(b);
    let Some(free) = mate_l.iter().position(Option::is_none) else {
        let pairs = mate_l.iter().enumerate().map(|(x, y)| (x, y.expect("perfect"))).collect();
        return Ok(HallOutcome::Perfect(Matching { pairs }));
    };
    let mut mate_r = vec![usize::MAX; b.right];
    for (x, y) in mate_l.iter().enumerate() {
        if let Some(y) = *y {
            mate_r[y] = x;
        }
    }
    // Every left vertex reachable from `free` by alternating paths; with a
    // maximum matching each reached right vertex is matched back into the set.
    let mut in_set = vec![false; b.left];
    let mut reached_r = vec![false; b.right];
    let mut stack = vec![free];
    in_set[free] = true;
    while let Some(x) = stack.pop() {
        for &y in &b.adj[x] {
            if !reached_r[y] {
                reached_r[y] = true;
                let x2 = mate_r[y];
                debug_assert!(x2 != usize::MAX, "maximum matching has no augmenting path");
                if !in_set[x2] {
                    in_set[x2] = true;
                    stack.push(x2);
                }
            }
        }
    }
    Ok(HallOutcome::Violation {
        set: (0..b.left).filter(|&x| in_set[x]).collect(),
        neighborhood: (0..b.right).filter(|&y| reached_r[y]).collect(),
    })
}

/// Uniformly random equitable split of `set`; when `|set|` is odd a fair coin
/// decides which half is larger.
pub fn random_equitable_split(set: &[usize], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut r = rng(seed);
    let mut items = set.to_vec();
    items.shuffle(&mut r);
    let half = if set.len() % 2 == 1 && r.random_bool(0.5) { set.len() / 2 + 1 } else { set.len() / 2 };
    let second = items.split_off(half);
    (items, second)
}

/// `e(A, B) / (|A||B|)` for the underlying undirected adjacency of `g`.
pub fn bipartite_density(g: &OrientedGraph, a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let edges = a.iter().map(|&x| b.iter().filter(|&&y| g.adjacent(x, y)).count()).sum::<usize>();
    edges as f64 / (a.len() * b.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matchings() {
        let path = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(max_matching(&path).len(), 1);
        let k4 = UndirectedGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let m = max_matching(&k4);
        assert_eq!(m.len(), 2);
        assert!(m.is_valid_in(&k4));
    }

    #[test]
    fn blossom_is_contracted() {
        // Odd cycle 0-1-2-3-4 with pendant 5 on 0 and pendant 6 on 2: a greedy
        // start can leave an augmenting path that only exists through the blossom.
        let g = UndirectedGraph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (2, 6)]);
        assert_eq!(max_matching(&g).len(), 3);
        let petersen_like = UndirectedGraph::from_edges(
            10,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)],
        );
        assert_eq!(max_matching(&petersen_like).len(), 5);
    }

    #[test]
    fn hall_cases() {
        let mut k33 = BipartiteGraph::new(3, 3);
        for x in 0..3 {
            for y in 0..3 {
                k33.add_edge(x, y);
            }
        }
        assert!(matches!(hall_perfect_matching(&k33), Ok(HallOutcome::Perfect(m)) if m.len() == 3));

        let mut isolated = BipartiteGraph::new(3, 3);
        for x in 1..3 {
            for y in 0..3 {
                isolated.add_edge(x, y);
            }
        }
        assert_eq!(
            hall_perfect_matching(&isolated).unwrap(),
            HallOutcome::Violation { set: vec![0], neighborhood: vec![] }
        );

        assert_eq!(
            hall_perfect_matching(&BipartiteGraph::new(2, 3)),
            Err(MatchingError::SizeMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn equitable_split_sizes() {
        let (a, b) = random_equitable_split(&[1, 2, 3, 4], 0);
        assert_eq!((a.len(), b.len()), (2, 2));
        for seed in 0..20 {
            let (a, b) = random_equitable_split(&[1, 2, 3, 4, 5], seed);
            assert_eq!(a.len() + b.len(), 5);
            assert!(a.len().abs_diff(b.len()) == 1);
            let mut all = [a, b].concat();
            all.sort_unstable();
            assert_eq!(all, vec![1, 2, 3, 4, 5]);
        }
    }
}
