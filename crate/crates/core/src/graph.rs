//! Oriented graphs, transitive triangles and tilings.
//!
//! An [`OrientedGraph`] stores dense out- and in-neighbourhood bitsets per
//! vertex, so arc membership and neighbourhood intersections are cheap. All
//! semidegree notation used throughout the crate (`δ⁺`, `δ⁻`, `δ⁰`, `δ`, `Δ`,
//! `d(v, A)`) is answered here.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop at vertex {0} rejected")]
    LoopRejected(usize),
    #[error("arc {v}->{u} already present, cannot add {u}->{v}")]
    OrientationConflict { u: usize, v: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    BadVertex { vertex: usize, n: usize },
    #[error("vertex {0} listed twice")]
    RepeatedVertex(usize),
}

/// Builds a bitset of capacity `n` with the given members set.
pub fn vertex_mask(n: usize, vertices: &[usize]) -> FixedBitSet {
    let mut mask = FixedBitSet::with_capacity(n);
    for &v in vertices {
        mask.insert(v);
    }
    mask
}

#[derive(Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    out: Vec<FixedBitSet>,
    inc: Vec<FixedBitSet>,
    arcs: usize,
}

impl fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrientedGraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .finish()
    }
}

impl OrientedGraph {
    /// Empty graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            out: vec![FixedBitSet::with_capacity(n); n],
            inc: vec![FixedBitSet::with_capacity(n); n],
            arcs: 0,
        }
    }

    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(n);
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// Transitive tournament on `n` vertices: `i -> j` for every `i < j`.
    pub fn transitive_tournament(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.insert_unchecked(i, j);
            }
        }
        g
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn directed_cycle(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            g.insert_unchecked(i, (i + 1) % n);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::BadVertex { vertex: v, n: self.n })
        }
    }

    fn insert_unchecked(&mut self, u: usize, v: usize) {
        if !self.out[u].contains(v) {
            self.out[u].insert(v);
            self.inc[v].insert(u);
            self.arcs += 1;
        }
    }

    /// Adds the arc `u -> v`. Adding an arc that is already present is a no-op.
    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::LoopRejected(u));
        }
        if self.out[v].contains(u) {
            return Err(GraphError::OrientationConflict { u, v });
        }
        self.insert_unchecked(u, v);
        Ok(())
    }

    /// Removes `u -> v` if present; returns whether it was.
    pub fn remove_arc(&mut self, u: usize, v: usize) -> bool {
        if u < self.n && v < self.n && self.out[u].contains(v) {
            self.out[u].set(v, false);
            self.inc[v].set(u, false);
            self.arcs -= 1;
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v) || self.inc[u].contains(v)
    }

    pub fn out_neighbors(&self, v: usize) -> &FixedBitSet {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &FixedBitSet {
        &self.inc[v]
    }

    /// Underlying undirected neighbourhood `N(v) = N⁺(v) ∪ N⁻(v)`.
    pub fn neighbors(&self, v: usize) -> FixedBitSet {
        let mut s = self.out[v].clone();
        s.union_with(&self.inc[v]);
        s
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].count_ones(..)
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inc[v].count_ones(..)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.out_degree(v) + self.in_degree(v)
    }

    /// `d⁺(v, A)`.
    pub fn out_degree_into(&self, v: usize, set: &FixedBitSet) -> usize {
        self.out[v].intersection_count(set)
    }

    /// `d⁻(v, A)`.
    pub fn in_degree_into(&self, v: usize, set: &FixedBitSet) -> usize {
        self.inc[v].intersection_count(set)
    }

    /// `d(v, A)`.
    pub fn degree_into(&self, v: usize, set: &FixedBitSet) -> usize {
        self.out_degree_into(v, set) + self.in_degree_into(v, set)
    }

    pub fn min_out_degree(&self) -> usize {
        (0..self.n).map(|v| self.out_degree(v)).min().unwrap_or(0)
    }

    pub fn min_in_degree(&self) -> usize {
        (0..self.n).map(|v| self.in_degree(v)).min().unwrap_or(0)
    }

    /// Minimum semidegree `δ⁰ = min_v min(d⁺(v), d⁻(v))`.
    pub fn min_semidegree(&self) -> usize {
        (0..self.n)
            .map(|v| self.out_degree(v).min(self.in_degree(v)))
            .min()
            .unwrap_or(0)
    }

    /// Minimum degree of the underlying undirected graph.
    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Maximum degree of the underlying undirected graph.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out[u].ones().map(move |v| (u, v)))
    }

    /// Number of arcs with both ends in `set`.
    pub fn arcs_within(&self, set: &FixedBitSet) -> usize {
        set.ones().map(|u| self.out[u].intersection_count(set)).sum()
    }

    /// Returns the roles of `{a, b, c}` if it spans a transitive triangle.
    pub fn transitive_triple(&self, a: usize, b: usize, c: usize) -> Option<TransitiveTriangle> {
        TransitiveTriangle::from_vertices(self, a, b, c)
    }

    pub fn is_cyclic_triple(&self, a: usize, b: usize, c: usize) -> bool {
        (self.has_arc(a, b) && self.has_arc(b, c) && self.has_arc(c, a))
            || (self.has_arc(a, c) && self.has_arc(c, b) && self.has_arc(b, a))
    }

    /// Every transitive triangle once, ordered by `(source, middle, sink)`.
    pub fn transitive_triangles(&self) -> Vec<TransitiveTriangle> {
        self.transitive_triangles_within(None)
    }

    /// Transitive triangles whose vertices all lie in `set` (all of `V` for `None`).
    pub fn transitive_triangles_within(&self, set: Option<&FixedBitSet>) -> Vec<TransitiveTriangle> {
        let mut found = Vec::new();
        let mut sinks = FixedBitSet::with_capacity(self.n);
        for s in 0..self.n {
            if set.is_some_and(|m| !m.contains(s)) {
                continue;
            }
            for m in self.out[s].ones() {
                if set.is_some_and(|mask| !mask.contains(m)) {
                    continue;
                }
                sinks.clone_from(&self.out[s]);
                sinks.intersect_with(&self.out[m]);
                if let Some(mask) = set {
                    sinks.intersect_with(mask);
                }
                found.extend(sinks.ones().map(|t| TransitiveTriangle { source: s, middle: m, sink: t }));
            }
        }
        found
    }

    /// Lexicographically first transitive triangle inside `set`.
    pub fn first_transitive_triangle_within(&self, set: &FixedBitSet) -> Option<TransitiveTriangle> {
        for s in set.ones() {
            for m in self.out[s].intersection(set) {
                if let Some(t) = self.out[s].intersection(&self.out[m]).find(|&t| set.contains(t)) {
                    return Some(TransitiveTriangle { source: s, middle: m, sink: t });
                }
            }
        }
        None
    }

    pub fn count_transitive_triangles(&self) -> usize {
        let mut total = 0;
        for s in 0..self.n {
            for m in self.out[s].ones() {
                total += self.out[s].intersection_count(&self.out[m]);
            }
        }
        total
    }

    /// Transitive triangles through `v`.
    pub fn transitive_triangles_at(&self, v: usize) -> Vec<TransitiveTriangle> {
        let nb = self.neighbors(v);
        let mut found = Vec::new();
        for a in nb.ones() {
            for b in nb.ones().filter(|&b| b > a) {
                if let Some(t) = self.transitive_triple(v, a, b) {
                    found.push(t);
                }
            }
        }
        found
    }

    /// Every directed 3-cycle once as `[a, b, c]` with `a` the smallest vertex
    /// and arcs `a -> b -> c -> a`; ordered lexicographically.
    pub fn cyclic_triangles(&self) -> Vec<[usize; 3]> {
        let mut found = Vec::new();
        for a in 0..self.n {
            for b in self.out[a].ones().filter(|&b| b > a) {
                for c in self.out[b].ones().filter(|&c| c > a) {
                    if self.out[c].contains(a) {
                        found.push([a, b, c]);
                    }
                }
            }
        }
        found
    }

    /// Subgraph induced by `vertices`; the returned map sends new ids to old ids.
    pub fn induced(&self, vertices: &[usize]) -> Result<(OrientedGraph, Vec<usize>), GraphError> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            if seen.put(v) {
                return Err(GraphError::RepeatedVertex(v));
            }
            new_id[v] = i;
        }
        let mut sub = OrientedGraph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.out[v].intersection(&seen) {
                sub.insert_unchecked(i, new_id[w]);
            }
        }
        Ok((sub, vertices.to_vec()))
    }

    /// Graph with every arc reversed.
    pub fn reversed(&self) -> OrientedGraph {
        OrientedGraph { n: self.n, out: self.inc.clone(), inc: self.out.clone(), arcs: self.arcs }
    }

    /// Checks disjointness and arc constraints of `tiling` against this graph.
    pub fn check_tiling(&self, tiling: &Tiling) -> Result<TilingCheck, TilingViolation> {
        let mut used = FixedBitSet::with_capacity(self.n);
        for (index, tile) in tiling.tiles.iter().enumerate() {
            for v in tile.vertices() {
                if v >= self.n {
                    return Err(TilingViolation::BadVertex { tile: index, vertex: v });
                }
            }
            let [s, m, t] = tile.vertices();
            if s == m || m == t || s == t {
                return Err(TilingViolation::RepeatedVertex { tile: index });
            }
            for (a, b) in [(s, m), (m, t), (s, t)] {
                if !self.has_arc(a, b) {
                    return Err(TilingViolation::MissingArc { tile: index, from: a, to: b });
                }
            }
            for v in tile.vertices() {
                if used.put(v) {
                    return Err(TilingViolation::Overlap { tile: index, vertex: v });
                }
            }
        }
        let covered = used.count_ones(..);
        Ok(TilingCheck { covered, perfect: covered == self.n })
    }
}

/// Transitive triangle with arcs `source -> middle`, `middle -> sink`, `source -> sink`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct TransitiveTriangle {
    pub source: usize,
    pub middle: usize,
    pub sink: usize,
}

impl From<[usize; 3]> for TransitiveTriangle {
    fn from([source, middle, sink]: [usize; 3]) -> Self {
        Self { source, middle, sink }
    }
}

impl From<TransitiveTriangle> for [usize; 3] {
    fn from(t: TransitiveTriangle) -> Self {
        t.vertices()
    }
}

impl TransitiveTriangle {
    pub fn vertices(&self) -> [usize; 3] {
        [self.source, self.middle, self.sink]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.source == v || self.middle == v || self.sink == v
    }

    /// Assigns roles to `{a, b, c}` if the three vertices span a transitive triangle.
    pub fn from_vertices(g: &OrientedGraph, a: usize, b: usize, c: usize) -> Option<Self> {
        if a == b || b == c || a == c {
            return None;
        }
        let vs = [a, b, c];
        let mut outdeg = [0usize; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j && g.has_arc(vs[i], vs[j]) {
                    outdeg[i] += 1;
                }
            }
        }
        // A tournament on three vertices is transitive iff its outdegrees are {0, 1, 2}.
        let mut roles = [usize::MAX; 3];
        for i in 0..3 {
            let slot = 2usize.checked_sub(outdeg[i])?;
            if roles[slot] != usize::MAX {
                return None;
            }
            roles[slot] = vs[i];
        }
        if !g.adjacent(a, b) || !g.adjacent(b, c) || !g.adjacent(a, c) {
            return None;
        }
        Some(Self { source: roles[0], middle: roles[1], sink: roles[2] })
    }
}

/// Vertex-disjoint transitive triangles.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tiling {
    pub tiles: Vec<TransitiveTriangle>,
}

impl Tiling {
    pub fn new(tiles: Vec<TransitiveTriangle>) -> Self {
        Self { tiles }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn covered_vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.tiles.iter().flat_map(|t| t.vertices()).collect();
        vs.sort_unstable();
        vs
    }

    /// Rewrites vertex ids through `map` (e.g. back from an induced subgraph).
    pub fn relabel(&self, map: &[usize]) -> Tiling {
        Tiling::new(
            self.tiles
                .iter()
                .map(|t| TransitiveTriangle { source: map[t.source], middle: map[t.middle], sink: map[t.sink] })
                .collect(),
        )
    }

    /// Consecutive triples `(3i, 3i+1, 3i+2)`; perfect on a transitive tournament.
    pub fn consecutive_triples(n: usize) -> Tiling {
        Tiling::new(
            (0..n / 3)
                .map(|i| TransitiveTriangle { source: 3 * i, middle: 3 * i + 1, sink: 3 * i + 2 })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingCheck {
    pub covered: usize,
    pub perfect: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingViolation {
    #[error("tile {tile}: vertex {vertex} out of range")]
    BadVertex { tile: usize, vertex: usize },
    #[error("tile {tile}: repeated vertex")]
    RepeatedVertex { tile: usize },
    #[error("tile {tile}: arc {from}->{to} missing")]
    MissingArc { tile: usize, from: usize, to: usize },
    #[error("tile {tile}: vertex {vertex} already covered by an earlier tile")]
    Overlap { tile: usize, vertex: usize },
}

/// Named, pairwise-disjoint vertex blocks. The blocks need not cover `V`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSetPartition {
    pub n: usize,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub vertices: Vec<usize>,
}

impl VertexSetPartition {
    pub fn new(n: usize, blocks: Vec<(String, Vec<usize>)>) -> Result<Self, GraphError> {
        let mut seen = FixedBitSet::with_capacity(n);
        for (_, vs) in &blocks {
            for &v in vs {
                if v >= n {
                    return Err(GraphError::BadVertex { vertex: v, n });
                }
                if seen.put(v) {
                    return Err(GraphError::RepeatedVertex(v));
                }
            }
        }
        Ok(Self {
            n,
            blocks: blocks.into_iter().map(|(name, vertices)| Block { name, vertices }).collect(),
        })
    }

    pub fn block(&self, name: &str) -> Option<&[usize]> {
        self.blocks.iter().find(|b| b.name == name).map(|b| b.vertices.as_slice())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.vertices.len()).collect()
    }

    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.blocks.iter().flat_map(|b| b.vertices.iter().copied()).collect();
        all.sort_unstable();
        all
    }
}
