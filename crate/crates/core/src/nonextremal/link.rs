//! Link gadgets between pairs of vertices.
//!
//! `x` and `y` are `p`-linked through a sequence `v1 = x, v2, …, v(3p+1) = y`
//! of distinct vertices when both `{v2, …, v(3p+1)}` and `{v1, …, v(3p)}`
//! have perfect tilings. Only injective witnesses are searched for.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{OrientedGraph, Tiling, TransitiveTriangle};
use crate::seed::rng;

/// Common neighbourhood of `x` and `y` split by arc directions, plus the
/// arcs `e` inside it for which both `xe` and `ye` are transitive triangles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantReport {
    pub x: usize,
    pub y: usize,
    /// `N⁺(x) ∩ N⁺(y)`.
    pub out_out: Vec<usize>,
    /// `N⁺(x) ∩ N⁻(y)`.
    pub out_in: Vec<usize>,
    /// `N⁻(x) ∩ N⁺(y)`.
    pub in_out: Vec<usize>,
    /// `N⁻(x) ∩ N⁻(y)`.
    pub in_in: Vec<usize>,
    /// Arcs from `in_in` into the common neighbourhood, arcs from the common
    /// neighbourhood into `out_out`, and arcs inside a single quadrant.
    pub f_arcs: Vec<(usize, usize)>,
}

impl QuadrantReport {
    pub fn common_neighbourhood(&self) -> Vec<usize> {
        let mut all: Vec<usize> =
            [&self.out_out, &self.out_in, &self.in_out, &self.in_in].into_iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

pub fn link_quadrants(g: &OrientedGraph, x: usize, y: usize) -> QuadrantReport {
    assert_ne!(x, y, "quadrants need two distinct vertices");
    let collect = |a: &FixedBitSet, b: &FixedBitSet| -> Vec<usize> { a.intersection(b).collect() };
    let (ox, ix, oy, iy) = (g.out_neighbors(x), g.in_neighbors(x), g.out_neighbors(y), g.in_neighbors(y));
    let quadrants = [collect(ox, oy), collect(ox, iy), collect(ix, oy), collect(ix, iy)];
    let n = g.vertex_count();
    let mut label = vec![usize::MAX; n];
    for (q, members) in quadrants.iter().enumerate() {
        for &v in members {
            label[v] = q;
        }
    }
    let (out_out, in_in) = (0, 3);
    let mut f_arcs = Vec::new();
    for a in 0..n {
        if label[a] == usize::MAX {
            continue;
        }
        for b in g.out_neighbors(a).ones() {
            let lb = label[b];
            if lb != usize::MAX && (label[a] == in_in || lb == out_out || label[a] == lb) {
                f_arcs.push((a, b));
            }
        }
    }
    let [q11, q12, q21, q22] = quadrants;
    QuadrantReport { x, y, out_out: q11, out_in: q12, in_out: q21, in_in: q22, f_arcs }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkWitness {
    pub p: usize,
    /// `v1 = x, …, v(3p+1) = y`.
    pub sequence: Vec<usize>,
    /// Perfect tiling of `{v2, …, v(3p+1)}`.
    pub tail_tiling: Tiling,
    /// Perfect tiling of `{v1, …, v(3p)}`.
    pub head_tiling: Tiling,
}

impl LinkWitness {
    pub fn x(&self) -> usize {
        self.sequence[0]
    }

    pub fn y(&self) -> usize {
        *self.sequence.last().expect("non-empty sequence")
    }

    /// Interior vertices `v2, …, v(3p)`.
    pub fn interior(&self) -> &[usize] {
        let len = self.sequence.len();
        if len < 2 {
            &[]
        } else {
            &self.sequence[1..len - 1]
        }
    }

    pub fn is_valid_in(&self, g: &OrientedGraph) -> bool {
        let len = self.sequence.len();
        if len != 3 * self.p + 1 {
            return false;
        }
        let mut sorted = self.sequence.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != len && self.p > 0 {
            return false;
        }
        let covers = |t: &Tiling, vs: &[usize]| {
            let mut want = vs.to_vec();
            want.sort_unstable();
            g.check_tiling(t).is_ok() && t.covered_vertices() == want
        };
        covers(&self.tail_tiling, &self.sequence[1..]) && covers(&self.head_tiling, &self.sequence[..len - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("link order {0} unsupported (expected 0, 1 or 2)")]
    UnsupportedOrder(usize),
}

/// Search limits for [`find_link`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkSearch {
    /// Vertices the gadget may not use (besides `x` and `y` themselves).
    pub avoid: Vec<usize>,
    pub seed: u64,
    /// Maximum number of candidate gadgets examined.
    pub budget: usize,
}

impl Default for LinkSearch {
    fn default() -> Self {
        Self { avoid: Vec::new(), seed: 0, budget: 200_000 }
    }
}

fn tt(g: &OrientedGraph, a: usize, b: usize, c: usize) -> Option<TransitiveTriangle> {
    TransitiveTriangle::from_vertices(g, a, b, c)
}

struct Search<'a> {
    g: &'a OrientedGraph,
    x: usize,
    y: usize,
    blocked: FixedBitSet,
    order: Vec<usize>,
    budget: usize,
}

impl Search<'_> {
    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn free(&self, v: usize) -> bool {
        !self.blocked.contains(v)
    }

    /// Arc-spanned pair `(a, b)` with `xab` and `yab` both transitive.
    fn one_link(&mut self, extra_block: &[usize]) -> Option<(usize, usize, TransitiveTriangle, TransitiveTriangle)> {
        let (g, x, y) = (self.g, self.x, self.y);
        let common: Vec<usize> = self
            .order
            .iter()
            .copied()
            .filter(|&v| self.free(v) && !extra_block.contains(&v) && g.adjacent(v, x) && g.adjacent(v, y))
            .collect();
        for (i, &a) in common.iter().enumerate() {
            for &b in &common[i + 1..] {
                if !self.spend() {
                    return None;
                }
                if let (Some(tx), Some(ty)) = (tt(g, x, a, b), tt(g, y, a, b)) {
                    return Some((a, b, tx, ty));
                }
            }
        }
        None
    }

    fn two_link_by_composition(&mut self) -> Option<LinkWitness> {
        let (a, b, tx, ty) = self.one_link(&[])?;
        let g = self.g;
        let pool: Vec<usize> = self.order.iter().copied().filter(|&v| self.free(v) && v != a && v != b).collect();
        // Any transitive triangle disjoint from the 1-link extends it.
        for (i, &c) in pool.iter().enumerate() {
            for (j, &d) in pool.iter().enumerate().skip(i + 1) {
                if !g.adjacent(c, d) {
                    continue;
                }
                for &e in &pool[j + 1..] {
                    if !self.spend() {
                        return None;
                    }
                    if let Some(t) = tt(g, c, d, e) {
                        return Some(LinkWitness {
                            p: 2,
                            sequence: vec![self.x, a, b, c, d, e, self.y],
                            tail_tiling: Tiling::new(vec![ty, t]),
                            head_tiling: Tiling::new(vec![tx, t]),
                        });
                    }
                }
            }
        }
        None
    }

    /// Transitive triangles `{v} ∪ A` with `A` a pair of free vertices.
    fn triangles_at(&self, v: usize) -> Vec<([usize; 2], TransitiveTriangle)> {
        let nb: Vec<usize> =
            self.order.iter().copied().filter(|&w| self.free(w) && self.g.adjacent(v, w)).collect();
        let mut found = Vec::new();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if let Some(t) = tt(self.g, v, a, b) {
                    found.push(([a, b], t));
                }
            }
        }
        found
    }

    /// Tiles `xA` and `yB` with the remaining interior vertices completing
    /// both sides; covers the cases `|A ∩ B| ∈ {0, 1}`.
    fn two_link_general(&mut self) -> Option<LinkWitness> {
        let g = self.g;
        let at_x = self.triangles_at(self.x);
        let at_y = self.triangles_at(self.y);
        let pool: Vec<usize> = self.order.iter().copied().filter(|&v| self.free(v)).collect();
        for (a, tx) in &at_x {
            for (b, ty) in &at_y {
                if !self.spend() {
                    return None;
                }
                let shared: Vec<usize> = a.iter().copied().filter(|v| b.contains(v)).collect();
                match shared.len() {
                    0 => {
                        for &e in &pool {
                            if a.contains(&e) || b.contains(&e) {
                                continue;
                            }
                            if let (Some(ta), Some(tb)) = (tt(g, a[0], a[1], e), tt(g, b[0], b[1], e)) {
                                return Some(LinkWitness {
                                    p: 2,
                                    sequence: vec![self.x, a[0], a[1], e, b[0], b[1], self.y],
                                    tail_tiling: Tiling::new(vec![*ty, ta]),
                                    head_tiling: Tiling::new(vec![*tx, tb]),
                                });
                            }
                        }
                    }
                    1 => {
                        let c = shared[0];
                        let a_only = if a[0] == c { a[1] } else { a[0] };
                        let b_only = if b[0] == c { b[1] } else { b[0] };
                        for (i, &e) in pool.iter().enumerate() {
                            if e == a_only || e == b_only || e == c {
                                continue;
                            }
                            for &f in &pool[i + 1..] {
                                if f == a_only || f == b_only || f == c {
                                    continue;
                                }
                                if let (Some(ta), Some(tb)) = (tt(g, a_only, e, f), tt(g, b_only, e, f)) {
                                    return Some(LinkWitness {
                                        p: 2,
                                        sequence: vec![self.x, a_only, c, b_only, e, f, self.y],
                                        tail_tiling: Tiling::new(vec![*ty, ta]),
                                        head_tiling: Tiling::new(vec![*tx, tb]),
                                    });
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        None
    }
}

/// Looks for a `p`-link from `x` to `y`. `x = y` is 0-linked by definition.
pub fn find_link(
    g: &OrientedGraph,
    x: usize,
    y: usize,
    p: usize,
    search: &LinkSearch,
) -> Result<Option<LinkWitness>, LinkError> {
    if p > 2 {
        return Err(LinkError::UnsupportedOrder(p));
    }
    if x == y {
        return Ok(Some(LinkWitness {
            p: 0,
            sequence: vec![x],
            tail_tiling: Tiling::default(),
            head_tiling: Tiling::default(),
        }));
    }
    if p == 0 {
        return Ok(None);
    }
    let n = g.vertex_count();
    let mut blocked = FixedBitSet::with_capacity(n);
    for &v in search.avoid.iter().chain([&x, &y]) {
        blocked.insert(v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(search.seed));
    let mut s = Search { g, x, y, blocked, order, budget: search.budget };
    let found = if p == 1 {
        s.one_link(&[]).map(|(a, b, tx, ty)| LinkWitness {
            p: 1,
            sequence: vec![x, a, b, y],
            tail_tiling: Tiling::new(vec![ty]),
            head_tiling: Tiling::new(vec![tx]),
        })
    } else {
        s.two_link_by_composition().or_else(|| s.two_link_general())
    };
    debug_assert!(found.as_ref().is_none_or(|w| w.is_valid_in(g)));
    Ok(found)
}
