//! Local search for a near-tiling that is maximal for the potential
//! `(|T|, |P|, |F|)` ordered lexicographically.
//!
//! The cover starts with every vertex single. Moves, tried in this order:
//!
//! * `Triangle`: a transitive triangle among non-tile vertices (paths and
//!   edges it touches dissolve into singles);
//! * `Path`: a directed path `u -> v -> w` among singles and edge vertices;
//! * `Edge`: an arc between two singles;
//! * `Swap`: exchange one tile vertex with a non-tile vertex (or two chained
//!   exchanges on different tiles) when that enables one of the moves above.
//!
//! A move is accepted only if the potential strictly increases, so the search
//! terminates and its log is strictly increasing.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::graph::{OrientedGraph, Tiling, TransitiveTriangle};

/// Decomposition `T ∪ P ∪ F ∪ I` of the vertex set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialCover {
    pub triangles: Vec<TransitiveTriangle>,
    /// Directed paths `[u, v, w]` with arcs `u -> v -> w`.
    pub paths: Vec<[usize; 3]>,
    pub edges: Vec<(usize, usize)>,
    pub singles: Vec<usize>,
}

impl PartialCover {
    pub fn potential(&self) -> (usize, usize, usize) {
        (self.triangles.len(), self.paths.len(), self.edges.len())
    }

    /// Vertices not covered by a triangle.
    pub fn leftover(&self) -> usize {
        3 * self.paths.len() + 2 * self.edges.len() + self.singles.len()
    }

    pub fn tiling(&self) -> Tiling {
        Tiling::new(self.triangles.clone())
    }

    pub fn uncovered_vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .paths
            .iter()
            .flat_map(|p| p.iter().copied())
            .chain(self.edges.iter().flat_map(|&(a, b)| [a, b]))
            .chain(self.singles.iter().copied())
            .collect();
        vs.sort_unstable();
        vs
    }

    /// Parts pairwise disjoint, covering `V(g)`, every path and edge present in `g`.
    pub fn is_valid_in(&self, g: &OrientedGraph) -> bool {
        if g.check_tiling(&self.tiling()).is_err() {
            return false;
        }
        let paths_ok = self.paths.iter().all(|&[u, v, w]| g.has_arc(u, v) && g.has_arc(v, w));
        let edges_ok = self.edges.iter().all(|&(a, b)| g.has_arc(a, b));
        let mut all: Vec<usize> = self.tiling().covered_vertices();
        all.extend(self.uncovered_vertices());
        all.sort_unstable();
        paths_ok && edges_ok && all == (0..g.vertex_count()).collect::<Vec<_>>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Triangle,
    Path,
    Edge,
    Swap { depth: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub potential: (usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexOutcome {
    pub cover: PartialCover,
    pub moves: Vec<MoveRecord>,
    /// The move budget ran out before a local maximum was reached.
    pub budget_exceeded: bool,
    pub leftover: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Owner {
    Tri(usize),
    Path(usize),
    Edge(usize),
    Single,
}

#[derive(Clone)]
struct State<'g> {
    g: &'g OrientedGraph,
    cover: PartialCover,
    owner: Vec<Owner>,
}

impl<'g> State<'g> {
    fn new(g: &'g OrientedGraph) -> Self {
        let n = g.vertex_count();
        Self {
            g,
            cover: PartialCover { singles: (0..n).collect(), ..PartialCover::default() },
            owner: vec![Owner::Single; n],
        }
    }

    fn reindex(&mut self) {
        let c = &self.cover;
        for (i, t) in c.triangles.iter().enumerate() {
            for v in t.vertices() {
                self.owner[v] = Owner::Tri(i);
            }
        }
        for (i, p) in c.paths.iter().enumerate() {
            for &v in p {
                self.owner[v] = Owner::Path(i);
            }
        }
        for (i, &(a, b)) in c.edges.iter().enumerate() {
            self.owner[a] = Owner::Edge(i);
            self.owner[b] = Owner::Edge(i);
        }
        for &v in &c.singles {
            self.owner[v] = Owner::Single;
        }
    }

    /// Dissolves the path or edge holding `v` into singles.
    fn release(&mut self, v: usize) {
        match self.owner[v] {
            Owner::Path(i) => {
                let p = self.cover.paths.swap_remove(i);
                self.cover.singles.extend(p);
            }
            Owner::Edge(i) => {
                let (a, b) = self.cover.edges.swap_remove(i);
                self.cover.singles.extend([a, b]);
            }
            Owner::Single => return,
            Owner::Tri(_) => unreachable!("tile vertices are never released"),
        }
        self.reindex();
    }

    /// Releases `vs` and removes them from the singles.
    fn claim(&mut self, vs: &[usize]) {
        for &v in vs {
            self.release(v);
        }
        self.cover.singles.retain(|s| !vs.contains(s));
    }

    fn add_triangle(&mut self, t: TransitiveTriangle) {
        self.claim(&t.vertices());
        self.cover.triangles.push(t);
        self.reindex();
    }

    fn add_path(&mut self, p: [usize; 3]) {
        self.claim(&p);
        self.cover.paths.push(p);
        self.reindex();
    }

    fn add_edge(&mut self, e: (usize, usize)) {
        self.claim(&[e.0, e.1]);
        self.cover.edges.push(e);
        self.reindex();
    }

    /// Replaces vertex `a` of tile `ti` by non-tile vertex `r`, if the result is transitive.
    fn swap(&mut self, ti: usize, a: usize, r: usize) -> bool {
        let t = self.cover.triangles[ti];
        let [p, q] = match t.vertices() {
            [x, y, z] if x == a => [y, z],
            [x, y, z] if y == a => [x, z],
            [x, y, _] => [x, y],
        };
        let Some(new_tile) = TransitiveTriangle::from_vertices(self.g, p, q, r) else {
            return false;
        };
        self.claim(&[r]);
        self.cover.triangles[ti] = new_tile;
        self.cover.singles.push(a);
        self.reindex();
        true
    }

    fn mask(&self, keep: impl Fn(Owner) -> bool) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.owner.len());
        for (v, &o) in self.owner.iter().enumerate() {
            if keep(o) {
                m.insert(v);
            }
        }
        m
    }

    fn find_triangle(&self) -> Option<TransitiveTriangle> {
        let pool = self.mask(|o| !matches!(o, Owner::Tri(_)));
        self.g.first_transitive_triangle_within(&pool)
    }

    fn find_path(&self) -> Option<[usize; 3]> {
        let free = self.mask(|o| matches!(o, Owner::Edge(_) | Owner::Single));
        for v in free.ones() {
            for u in self.g.in_neighbors(v).intersection(&free) {
                if let Some(w) = self.g.out_neighbors(v).intersection(&free).find(|&w| w != u) {
                    return Some([u, v, w]);
                }
            }
        }
        None
    }

    fn find_edge(&self) -> Option<(usize, usize)> {
        let singles = self.mask(|o| o == Owner::Single);
        singles.ones().find_map(|a| self.g.out_neighbors(a).intersection(&singles).next().map(|b| (a, b)))
    }

    /// Applies the first available basic move; returns its kind.
    fn basic_move(&mut self, allow: [bool; 3]) -> Option<MoveKind> {
        if allow[0] {
            if let Some(t) = self.find_triangle() {
                self.add_triangle(t);
                return Some(MoveKind::Triangle);
            }
        }
        if allow[1] {
            if let Some(p) = self.find_path() {
                self.add_path(p);
                return Some(MoveKind::Path);
            }
        }
        if allow[2] {
            if let Some(e) = self.find_edge() {
                self.add_edge(e);
                return Some(MoveKind::Edge);
            }
        }
        None
    }

    fn non_tile_vertices(&self) -> Vec<usize> {
        (0..self.owner.len()).filter(|&v| !matches!(self.owner[v], Owner::Tri(_))).collect()
    }

    /// Swap (depth 1 for any basic move, depth 2 for a new triangle) that
    /// strictly raises the potential.
    fn swap_move(&self) -> Option<(State<'g>, u8)> {
        let base = self.cover.potential();
        let pool = self.non_tile_vertices();
        for ti in 0..self.cover.triangles.len() {
            for a in self.cover.triangles[ti].vertices() {
                for &r in &pool {
                    let mut s1 = self.clone();
                    if !s1.swap(ti, a, r) {
                        continue;
                    }
                    let mut s = s1.clone();
                    if s.basic_move([true; 3]).is_some() && s.cover.potential() > base {
                        return Some((s, 1));
                    }
                    for tj in (0..s1.cover.triangles.len()).filter(|&tj| tj != ti) {
                        for b in s1.cover.triangles[tj].vertices() {
                            let mut s2 = s1.clone();
                            if s2.swap(tj, b, a) && s2.basic_move([true, false, false]).is_some() {
                                return Some((s2, 2));
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

/// Runs the move search until no move applies or `move_budget` moves were accepted.
pub fn lex_max_tiling(g: &OrientedGraph, move_budget: usize) -> LexOutcome {
    let mut state = State::new(g);
    let mut moves = Vec::new();
    let mut budget_exceeded = false;
    loop {
        if moves.len() >= move_budget {
            let mut probe = state.clone();
            budget_exceeded = probe.basic_move([true; 3]).is_some() || state.swap_move().is_some();
            break;
        }
        let before = state.cover.potential();
        let kind = match state.basic_move([true; 3]) {
            Some(kind) => kind,
            None => match state.swap_move() {
                Some((next, depth)) => {
                    state = next;
                    MoveKind::Swap { depth }
                }
                None => break,
            },
        };
        let potential = state.cover.potential();
        assert!(potential > before, "accepted move must raise the potential");
        moves.push(MoveRecord { kind, potential });
    }
    let mut cover = state.cover;
    cover.singles.sort_unstable();
    let leftover = cover.leftover();
    LexOutcome { cover, moves, budget_exceeded, leftover }
}

/// Sizes of the non-triangle parts and whether they exceed `|P| ≤ 2`,
/// `|F| ≤ 1`, `|I| ≤ 3`. The bounds concern a global maximum under
/// `18δ⁰ ≥ 7n`; a local maximum may exceed them, so they are flagged only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBounds {
    pub paths: usize,
    pub edges: usize,
    pub singles: usize,
    pub hypothesis_met: bool,
    pub violations: Vec<String>,
}

pub fn cover_structure_bounds(g: &OrientedGraph, pc: &PartialCover) -> CoverBounds {
    let n = g.vertex_count();
    let hypothesis_met = n > 0 && 18 * g.min_semidegree() >= 7 * n;
    let (paths, edges, singles) = (pc.paths.len(), pc.edges.len(), pc.singles.len());
    let mut violations = Vec::new();
    for (name, value, bound) in [("paths", paths, 2), ("edges", edges, 1), ("singles", singles, 3)] {
        if value > bound {
            violations.push(format!("{name} = {value} > {bound}"));
        }
    }
    CoverBounds { paths, edges, singles, hypothesis_met, violations }
}
