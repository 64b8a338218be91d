//! Exact perfect and maximum transitive-triangle tilings.
//!
//! Both searches treat every transitive triangle as a candidate tile and run a
//! dancing-links style cover/uncover over per-vertex candidate counts. The
//! branching vertex is always the uncovered vertex with the fewest live
//! candidates (lowest id on ties), so node counts are reproducible.
//!
//! Pruning uses two sound bounds on the number of further disjoint tiles:
//! `⌊remaining/3⌋` and the size of a greedy transversal of the live candidates
//! (any set of vertices meeting every live triangle bounds a packing).

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{OrientedGraph, Tiling, TransitiveTriangle};
use crate::par::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveBudget {
    pub node_limit: u64,
    pub time_limit_ms: u64,
}

impl SolveBudget {
    pub fn new(node_limit: u64, time_limit_ms: u64) -> Self {
        assert!(node_limit > 0 && time_limit_ms > 0, "budget limits must be positive");
        Self { node_limit, time_limit_ms }
    }

    pub fn unlimited() -> Self {
        Self { node_limit: u64::MAX, time_limit_ms: u64::MAX }
    }

    pub fn time_ms(time_limit_ms: u64) -> Self {
        Self::new(u64::MAX, time_limit_ms)
    }

    pub fn nodes(node_limit: u64) -> Self {
        Self::new(node_limit, u64::MAX)
    }

    fn deadline(&self, start: Instant) -> Option<Instant> {
        start.checked_add(Duration::from_millis(self.time_limit_ms))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "tiling", rename_all = "snake_case")]
pub enum SolveStatus {
    Tiling(Tiling),
    NoTiling,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub stats: SearchStats,
}

impl SolveOutcome {
    pub fn tiling(&self) -> Option<&Tiling> {
        match &self.status {
            SolveStatus::Tiling(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_definitive(&self) -> bool {
        !matches!(self.status, SolveStatus::BudgetExceeded)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxTilingOutcome {
    pub tiling: Tiling,
    /// The search finished inside the budget, so no larger tiling exists.
    pub optimal: bool,
    pub stats: SearchStats,
}

const NONE: u32 = u32::MAX;

struct CoverSearch {
    tris: Vec<[u32; 3]>,
    by_vertex: Vec<Vec<u32>>,
    alive: Vec<bool>,
    count: Vec<u32>,
    taken: Vec<bool>,
    trail: Vec<u32>,
    chosen: Vec<u32>,
    remaining: usize,
    scratch_count: Vec<u32>,
    scratch_stamp: Vec<u32>,
    stamp: u32,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    exhausted: bool,
}

impl CoverSearch {
    fn new(g: &OrientedGraph, budget: SolveBudget, start: Instant) -> Self {
        let n = g.vertex_count();
        let tris: Vec<[u32; 3]> = g.transitive_triangles().iter().map(|t| t.vertices().map(|v| v as u32)).collect();
        let mut by_vertex = vec![Vec::new(); n];
        for (i, t) in tris.iter().enumerate() {
            for &v in t {
                by_vertex[v as usize].push(i as u32);
            }
        }
        let count = by_vertex.iter().map(|l| l.len() as u32).collect();
        Self {
            alive: vec![true; tris.len()],
            scratch_stamp: vec![0; tris.len()],
            tris,
            by_vertex,
            count,
            taken: vec![false; n],
            trail: Vec::new(),
            chosen: Vec::new(),
            remaining: n,
            scratch_count: vec![0; n],
            stamp: 0,
            nodes: 0,
            node_limit: budget.node_limit,
            deadline: budget.deadline(start),
            exhausted: false,
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.exhausted = true;
        } else if self.nodes.is_multiple_of(256) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.exhausted = true;
                }
            }
        }
        !self.exhausted
    }

    /// Removes `v` from play and kills every live candidate through it.
    fn take_vertex(&mut self, v: usize) {
        self.taken[v] = true;
        self.remaining -= 1;
        for i in 0..self.by_vertex[v].len() {
            let t = self.by_vertex[v][i];
            if self.alive[t as usize] {
                self.alive[t as usize] = false;
                for &u in &self.tris[t as usize] {
                    self.count[u as usize] -= 1;
                }
                self.trail.push(t);
            }
        }
    }

    fn restore(&mut self, mark: usize, vertices: &[usize]) {
        while self.trail.len() > mark {
            let t = self.trail.pop().expect("trail above mark");
            self.alive[t as usize] = true;
            for &u in &self.tris[t as usize] {
                self.count[u as usize] += 1;
            }
        }
        for &v in vertices {
            self.taken[v] = false;
            self.remaining += 1;
        }
    }

    fn place(&mut self, t: u32) -> usize {
        let mark = self.trail.len();
        let vs = self.tris[t as usize];
        for v in vs {
            self.take_vertex(v as usize);
        }
        self.chosen.push(t);
        mark
    }

    fn unplace(&mut self, t: u32, mark: usize) {
        let vs = self.tris[t as usize].map(|v| v as usize);
        self.restore(mark, &vs);
        self.chosen.pop();
    }

    /// Uncovered vertex with the fewest live candidates; `coverable_only`
    /// skips vertices that no live candidate can reach.
    fn branch_vertex(&self, coverable_only: bool) -> Option<usize> {
        let mut best = NONE;
        let mut best_v = None;
        for v in 0..self.taken.len() {
            if self.taken[v] || (coverable_only && self.count[v] == 0) {
                continue;
            }
            if self.count[v] < best {
                best = self.count[v];
                best_v = Some(v);
                if best == 0 {
                    break;
                }
            }
        }
        best_v
    }

    fn coverable(&self) -> usize {
        (0..self.taken.len()).filter(|&v| !self.taken[v] && self.count[v] > 0).count()
    }

    /// Size of a greedy transversal of the live candidates, stopping early
    /// once it reaches `stop_at`.
    fn transversal_bound(&mut self, stop_at: usize) -> usize {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.scratch_stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        self.scratch_count.copy_from_slice(&self.count);
        let mut picked = 0;
        while picked < stop_at {
            let mut best = 0;
            let mut best_v = usize::MAX;
            for v in 0..self.taken.len() {
                if !self.taken[v] && self.scratch_count[v] > best {
                    best = self.scratch_count[v];
                    best_v = v;
                }
            }
            if best == 0 {
                break;
            }
            picked += 1;
            for i in 0..self.by_vertex[best_v].len() {
                let t = self.by_vertex[best_v][i] as usize;
                if self.alive[t] && self.scratch_stamp[t] != self.stamp {
                    self.scratch_stamp[t] = self.stamp;
                    for &u in &self.tris[t] {
                        self.scratch_count[u as usize] -= 1;
                    }
                }
            }
        }
        picked
    }

    fn live_candidates_of(&self, v: usize) -> Vec<u32> {
        self.by_vertex[v].iter().copied().filter(|&t| self.alive[t as usize]).collect()
    }

    fn perfect(&mut self) -> bool {
        if !self.tick() {
            return false;
        }
        let Some(v) = self.branch_vertex(false) else {
            return true;
        };
        if self.count[v] == 0 {
            return false;
        }
        let needed = self.remaining / 3;
        if self.transversal_bound(needed) < needed {
            return false;
        }
        for t in self.live_candidates_of(v) {
            let mark = self.place(t);
            if self.perfect() {
                return true;
            }
            self.unplace(t, mark);
            if self.exhausted {
                return false;
            }
        }
        false
    }

    fn greedy_dive(&mut self) -> Vec<u32> {
        let mut marks = Vec::new();
        while let Some(v) = self.branch_vertex(true) {
            let t = self.live_candidates_of(v)[0];
            marks.push((t, self.place(t)));
        }
        let result = self.chosen.clone();
        while let Some((t, mark)) = marks.pop() {
            self.unplace(t, mark);
        }
        result
    }

    fn maximum(&mut self, best: &mut Vec<u32>) {
        if !self.tick() {
            return;
        }
        let placed = self.chosen.len();
        let Some(v) = self.branch_vertex(true) else {
            if placed > best.len() {
                best.clone_from(&self.chosen);
            }
            return;
        };
        let simple = self.coverable() / 3;
        if placed + simple <= best.len() {
            return;
        }
        let stop_at = best.len() + 1 - placed;
        if placed + self.transversal_bound(stop_at) <= best.len() {
            return;
        }
        for t in self.live_candidates_of(v) {
            let mark = self.place(t);
            self.maximum(best);
            self.unplace(t, mark);
            if self.exhausted {
                return;
            }
        }
        // Leave `v` uncovered.
        let mark = self.trail.len();
        self.take_vertex(v);
        self.maximum(best);
        self.restore(mark, &[v]);
    }

    fn tiling(&self, ids: &[u32]) -> Tiling {
        Tiling::new(
            ids.iter()
                .map(|&t| {
                    let [s, m, k] = self.tris[t as usize];
                    TransitiveTriangle { source: s as usize, middle: m as usize, sink: k as usize }
                })
                .collect(),
        )
    }
}

fn stats(nodes: u64, start: Instant) -> SearchStats {
    SearchStats { nodes, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 }
}

/// Decides whether `g` has a perfect tiling and returns a witness if so.
pub fn find_perfect_tiling(g: &OrientedGraph, budget: SolveBudget) -> SolveOutcome {
    let start = Instant::now();
    if !g.vertex_count().is_multiple_of(3) {
        return SolveOutcome { status: SolveStatus::NoTiling, stats: stats(0, start) };
    }
    let mut search = CoverSearch::new(g, budget, start);
    let found = search.perfect();
    let status = if found {
        let tiling = search.tiling(&search.chosen);
        debug_assert!(g.check_tiling(&tiling).is_ok_and(|c| c.perfect));
        SolveStatus::Tiling(tiling)
    } else if search.exhausted {
        SolveStatus::BudgetExceeded
    } else {
        SolveStatus::NoTiling
    };
    SolveOutcome { status, stats: stats(search.nodes, start) }
}

/// Branch-and-bound for a maximum tiling, seeded with a greedy lower bound.
pub fn max_tiling(g: &OrientedGraph, budget: SolveBudget) -> MaxTilingOutcome {
    let start = Instant::now();
    let mut search = CoverSearch::new(g, budget, start);
    let mut best = search.greedy_dive();
    search.maximum(&mut best);
    MaxTilingOutcome { tiling: search.tiling(&best), optimal: !search.exhausted, stats: stats(search.nodes, start) }
}

/// Size of a greedy tiling (lower bound used to seed [`max_tiling`]).
pub fn greedy_tiling(g: &OrientedGraph) -> Tiling {
    let start = Instant::now();
    let mut search = CoverSearch::new(g, SolveBudget::unlimited(), start);
    let best = search.greedy_dive();
    search.tiling(&best)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExhaustiveError {
    #[error("minimum semidegree {d} is infeasible on {n} vertices (at most {max})")]
    InfeasibleBound { n: usize, d: usize, max: usize },
    #[error("exhaustive enumeration supports n <= 9, got {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    pub n: usize,
    pub min_semidegree: usize,
    /// Labeled oriented graphs on `n` vertices with `δ⁰ ≥ min_semidegree`.
    pub instances: u64,
    pub tournaments: u64,
    pub tileable: u64,
    pub non_tileable: u64,
    pub non_tileable_tournaments: u64,
    pub budget_exceeded: u64,
    /// Arc lists of the first non-tileable instances in enumeration order.
    pub non_tileable_examples: Vec<Vec<(usize, usize)>>,
}

const EXAMPLE_CAP: usize = 32;

impl ExhaustiveReport {
    fn empty(n: usize, d: usize) -> Self {
        Self {
            n,
            min_semidegree: d,
            instances: 0,
            tournaments: 0,
            tileable: 0,
            non_tileable: 0,
            non_tileable_tournaments: 0,
            budget_exceeded: 0,
            non_tileable_examples: Vec::new(),
        }
    }

    fn merge(&mut self, other: ExhaustiveReport) {
        self.instances += other.instances;
        self.tournaments += other.tournaments;
        self.tileable += other.tileable;
        self.non_tileable += other.non_tileable;
        self.non_tileable_tournaments += other.non_tileable_tournaments;
        self.budget_exceeded += other.budget_exceeded;
        for ex in other.non_tileable_examples {
            if self.non_tileable_examples.len() < EXAMPLE_CAP {
                self.non_tileable_examples.push(ex);
            }
        }
    }
}

/// Orientation of one vertex pair during enumeration.
#[derive(Clone, Copy)]
enum Pair {
    Absent,
    Forward,
    Backward,
}

struct Enumerator {
    n: usize,
    d: usize,
    pairs: Vec<(usize, usize)>,
}

#[derive(Clone)]
struct Partial {
    choice: Vec<Pair>,
    out: Vec<usize>,
    inc: Vec<usize>,
    rem: Vec<usize>,
}

impl Enumerator {
    fn feasible(&self, p: &Partial, v: usize) -> bool {
        p.out[v] + p.rem[v] >= self.d && p.inc[v] + p.rem[v] >= self.d && p.out[v] + p.inc[v] + p.rem[v] >= 2 * self.d
    }

    fn assign(&self, p: &mut Partial, k: usize, c: Pair) -> bool {
        let (u, v) = self.pairs[k];
        p.rem[u] -= 1;
        p.rem[v] -= 1;
        match c {
            Pair::Absent => {}
            Pair::Forward => {
                p.out[u] += 1;
                p.inc[v] += 1;
            }
            Pair::Backward => {
                p.out[v] += 1;
                p.inc[u] += 1;
            }
        }
        p.choice.push(c);
        self.feasible(p, u) && self.feasible(p, v)
    }

    fn unassign(&self, p: &mut Partial, k: usize) {
        let (u, v) = self.pairs[k];
        match p.choice.pop().expect("assigned") {
            Pair::Absent => {}
            Pair::Forward => {
                p.out[u] -= 1;
                p.inc[v] -= 1;
            }
            Pair::Backward => {
                p.out[v] -= 1;
                p.inc[u] -= 1;
            }
        }
        p.rem[u] += 1;
        p.rem[v] += 1;
    }

    /// Depth-first over pairs `depth..stop`, calling `leaf` on each completed prefix.
    fn walk(&self, p: &mut Partial, depth: usize, stop: usize, leaf: &mut dyn FnMut(&Partial)) {
        if depth == stop {
            leaf(p);
            return;
        }
        for c in [Pair::Absent, Pair::Forward, Pair::Backward] {
            if self.assign(p, depth, c) {
                self.walk(p, depth + 1, stop, leaf);
            }
            self.unassign(p, depth);
        }
    }

    fn arcs(&self, p: &Partial) -> Vec<(usize, usize)> {
        p.choice
            .iter()
            .zip(&self.pairs)
            .filter_map(|(c, &(u, v))| match c {
                Pair::Absent => None,
                Pair::Forward => Some((u, v)),
                Pair::Backward => Some((v, u)),
            })
            .collect()
    }
}

/// Enumerates every labeled oriented graph on `n ≤ 9` vertices with
/// `δ⁰ ≥ min_semideg` and decides each for a perfect tiling.
pub fn decide_small_exhaustive(
    n: usize,
    min_semideg: usize,
    exec: Execution,
) -> Result<ExhaustiveReport, ExhaustiveError> {
    if n > 9 {
        return Err(ExhaustiveError::TooLarge(n));
    }
    let max = n.saturating_sub(1) / 2;
    if min_semideg > max {
        return Err(ExhaustiveError::InfeasibleBound { n, d: min_semideg, max });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let en = Enumerator { n, d: min_semideg, pairs };
    let total_pairs = en.pairs.len();
    let root = Partial {
        choice: Vec::with_capacity(total_pairs),
        out: vec![0; n],
        inc: vec![0; n],
        rem: vec![n.saturating_sub(1); n],
    };
    // Pairs at vertex 0 form the split prefix; each prefix is an independent task.
    let split = n.saturating_sub(1).min(total_pairs);
    let mut prefixes = Vec::new();
    en.walk(&mut root.clone(), 0, split, &mut |p| prefixes.push(p.clone()));

    let parts = map_indexed(exec, prefixes.len(), |i| {
        let mut local = ExhaustiveReport::empty(n, min_semideg);
        let mut p = prefixes[i].clone();
        en.walk(&mut p, split, total_pairs, &mut |leaf| {
            let arcs = en.arcs(leaf);
            let tournament = arcs.len() == total_pairs;
            let g = OrientedGraph::from_arcs(en.n, arcs.iter().copied()).expect("enumerated pairs are valid");
            debug_assert!(g.min_semidegree() >= en.d);
            local.instances += 1;
            local.tournaments += u64::from(tournament);
            match find_perfect_tiling(&g, SolveBudget::unlimited()).status {
                SolveStatus::Tiling(_) => local.tileable += 1,
                SolveStatus::NoTiling => {
                    local.non_tileable += 1;
                    local.non_tileable_tournaments += u64::from(tournament);
                    if local.non_tileable_examples.len() < EXAMPLE_CAP {
                        local.non_tileable_examples.push(arcs);
                    }
                }
                SolveStatus::BudgetExceeded => local.budget_exceeded += 1,
            }
        });
        local
    });
    let mut report = ExhaustiveReport::empty(n, min_semideg);
    for part in parts {
        report.merge(part);
    }
    Ok(report)
}
