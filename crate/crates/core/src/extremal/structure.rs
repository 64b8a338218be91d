//! Large transitive-triangle-free sets, their cyclic partition, and the
//! classification of every vertex against that partition.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{vertex_mask, OrientedGraph};

/// Three disjoint parts; arcs are expected to run `W[i] -> W[i+1]` (indices mod 3).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicTriple {
    pub parts: [Vec<usize>; 3],
}

impl CyclicTriple {
    pub fn sizes(&self) -> [usize; 3] {
        [self.parts[0].len(), self.parts[1].len(), self.parts[2].len()]
    }

    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.parts.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn masks(&self, n: usize) -> [FixedBitSet; 3] {
        [0, 1, 2].map(|i| vertex_mask(n, &self.parts[i]))
    }

    /// `d⁺(v, W[i−1]) + d(v, W[i]) + d⁻(v, W[i+1])`: arcs of `v` against the
    /// cyclic pattern when `v` is placed in part `i`.
    pub fn cyclic_defect(g: &OrientedGraph, masks: &[FixedBitSet; 3], v: usize, i: usize) -> usize {
        let prev = &masks[(i + 2) % 3];
        let next = &masks[(i + 1) % 3];
        g.out_degree_into(v, prev) + g.degree_into(v, &masks[i]) + g.in_degree_into(v, next)
    }

    /// Parts pairwise within `λn` and covering at least `(2/3 − λ)n` vertices.
    pub fn is_equitable(&self, n: usize, lambda: f64) -> bool {
        let s = self.sizes();
        let spread = s.iter().max().unwrap() - s.iter().min().unwrap();
        spread as f64 <= lambda * n as f64 && (s.iter().sum::<usize>() as f64) >= (2.0 / 3.0 - lambda) * n as f64
    }

    /// Every vertex of `W[i]` is `(i, γ)`-cyclic.
    pub fn is_cyclic(&self, g: &OrientedGraph, gamma: f64) -> bool {
        let masks = self.masks(g.vertex_count());
        let bound = gamma * g.vertex_count() as f64;
        (0..3).all(|i| self.parts[i].iter().all(|&v| Self::cyclic_defect(g, &masks, v, i) as f64 <= bound))
    }
}

fn has_triangle_through(g: &OrientedGraph, v: usize, set: &FixedBitSet) -> bool {
    let nb: Vec<usize> = g.neighbors(v).intersection(set).collect();
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if g.transitive_triple(v, a, b).is_some() {
                return true;
            }
        }
    }
    false
}

/// Drops vertices lying on the most transitive triangles until none remain,
/// then adds outside vertices (lowest id first) that keep the set free of them.
fn prune_and_extend(g: &OrientedGraph, mut set: FixedBitSet) -> FixedBitSet {
    let n = g.vertex_count();
    loop {
        let tts = g.transitive_triangles_within(Some(&set));
        if tts.is_empty() {
            break;
        }
        let mut count = vec![0usize; n];
        for t in &tts {
            for v in t.vertices() {
                count[v] += 1;
            }
        }
        let worst = (0..n).max_by(|&a, &b| count[a].cmp(&count[b]).then(b.cmp(&a))).expect("n > 0");
        set.set(worst, false);
    }
    for v in 0..n {
        if !set.contains(v) && !has_triangle_through(g, v, &set) {
            set.insert(v);
        }
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("largest transitive-triangle-free set found has {best} vertices, {required} required")]
pub struct NotFound {
    pub best: usize,
    pub required: usize,
}

const SEED_TRIANGLES: usize = 16;

/// Heuristic search for a transitive-triangle-free set of at least
/// `min_size` vertices, seeded from the parts `N⁺(w_{i−1}) ∩ N⁻(w_{i+1})`
/// of cyclic triangles `w_1 w_2 w_3`. The result is verified exactly.
pub fn find_tt3_free_witness(g: &OrientedGraph, min_size: usize) -> Result<Vec<usize>, NotFound> {
    let n = g.vertex_count();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let mut best = if g.first_transitive_triangle_within(&all).is_none() {
        all
    } else {
        prune_and_extend(g, FixedBitSet::with_capacity(n))
    };
    if best.count_ones(..) < n {
        let cyc = g.cyclic_triangles();
        let picks = cyc.len().min(SEED_TRIANGLES);
        for k in 0..picks {
            let w = cyc[k * cyc.len() / picks];
            let mut seed = FixedBitSet::with_capacity(n);
            for i in 0..3 {
                let mut part = g.out_neighbors(w[(i + 2) % 3]).clone();
                part.intersect_with(g.in_neighbors(w[(i + 1) % 3]));
                seed.union_with(&part);
            }
            let found = prune_and_extend(g, seed);
            if found.count_ones(..) > best.count_ones(..) {
                best = found;
            }
        }
    }
    debug_assert!(g.first_transitive_triangle_within(&best).is_none());
    let size = best.count_ones(..);
    if size >= min_size {
        Ok(best.ones().collect())
    } else {
        Err(NotFound { best: size, required: min_size })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum PartitionError {
    #[error("the set spans a transitive triangle")]
    NotTriangleFree,
    #[error("the set spans no cyclic triangle")]
    NoCyclicTriangle,
    #[error("vertex {0} fits no part without breaking the cyclic pattern")]
    PlacementFailed(usize),
}

/// Splits a transitive-triangle-free set `w` into a 0-cyclic triple: the
/// parts grow from a cyclic triangle and every further vertex joins a part
/// against which it has no wrong-way arcs.
pub fn cyclic_partition(g: &OrientedGraph, w: &[usize]) -> Result<CyclicTriple, PartitionError> {
    let n = g.vertex_count();
    let wmask = vertex_mask(n, w);
    if g.first_transitive_triangle_within(&wmask).is_some() {
        return Err(PartitionError::NotTriangleFree);
    }
    let (sub, map) = g.induced(w).expect("valid vertex set");
    let Some(&[a, b, c]) = sub.cyclic_triangles().first() else {
        return Err(PartitionError::NoCyclicTriangle);
    };
    let tri = [map[a], map[b], map[c]];
    let mut parts: [Vec<usize>; 3] = Default::default();
    let mut placed = FixedBitSet::with_capacity(n);
    for i in 0..3 {
        let mut part = g.out_neighbors(tri[(i + 2) % 3]).clone();
        part.intersect_with(g.in_neighbors(tri[(i + 1) % 3]));
        part.intersect_with(&wmask);
        parts[i] = part.ones().collect();
        placed.union_with(&part);
    }
    let mut pending: Vec<usize> = w.iter().copied().filter(|&v| !placed.contains(v)).collect();
    pending.sort_unstable();
    while !pending.is_empty() {
        let triple = CyclicTriple { parts: parts.clone() };
        let masks = triple.masks(n);
        let before = pending.len();
        pending.retain(|&v| match (0..3).find(|&i| CyclicTriple::cyclic_defect(g, &masks, v, i) == 0) {
            Some(i) => {
                parts[i].push(v);
                false
            }
            None => true,
        });
        if pending.len() == before {
            return Err(PartitionError::PlacementFailed(pending[0]));
        }
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    let triple = CyclicTriple { parts };
    if !triple.is_cyclic(g, 0.0) {
        let masks = triple.masks(n);
        let v = (0..3)
            .flat_map(|i| triple.parts[i].iter().map(move |&v| (i, v)))
            .find(|&(i, v)| CyclicTriple::cyclic_defect(g, &masks, v, i) > 0)
            .map(|(_, v)| v)
            .expect("some vertex breaks the pattern");
        return Err(PartitionError::PlacementFailed(v));
    }
    Ok(triple)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexLabel {
    /// `(i, γ)`-cyclic for the smallest such part index `i`.
    Cyclic(usize),
    Bad,
}

/// The triple, the rest `U`, the poorly attached set `Z` and its pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalDecomposition {
    pub n: usize,
    pub triple: CyclicTriple,
    pub u: Vec<usize>,
    /// Label of every vertex for the classification threshold `γn`.
    pub labels: Vec<VertexLabel>,
    /// `u ∈ U` with `d(u, W) < |W| − τn`.
    pub z: Vec<usize>,
    /// Vertices of `Z` that are `(i, τ)`-cyclic, by part.
    pub z_parts: [Vec<usize>; 3],
    /// `Z(1) ∪ Z(2) ∪ Z(3)`.
    pub z_cyclic: Vec<usize>,
    /// `Z` minus `z_cyclic`.
    pub z_bad: Vec<usize>,
    /// `W[i] ∪ Z(i)`.
    pub w_prime: [Vec<usize>; 3],
    /// `U` minus `z_cyclic`.
    pub u_prime: Vec<usize>,
}

fn smallest_cyclic_part(g: &OrientedGraph, masks: &[FixedBitSet; 3], v: usize, bound: f64) -> Option<usize> {
    (0..3).find(|&i| CyclicTriple::cyclic_defect(g, masks, v, i) as f64 <= bound)
}

pub fn classify_vertices(g: &OrientedGraph, triple: &CyclicTriple, gamma: f64, tau: f64) -> ExtremalDecomposition {
    let n = g.vertex_count();
    let masks = triple.masks(n);
    let w = triple.union();
    let wmask = vertex_mask(n, &w);
    let u: Vec<usize> = (0..n).filter(|&v| !wmask.contains(v)).collect();
    let labels = (0..n)
        .map(|v| match smallest_cyclic_part(g, &masks, v, gamma * n as f64) {
            Some(i) => VertexLabel::Cyclic(i),
            None => VertexLabel::Bad,
        })
        .collect();
    let threshold = w.len() as f64 - tau * n as f64;
    let z: Vec<usize> = u.iter().copied().filter(|&v| (g.degree_into(v, &wmask) as f64) < threshold).collect();
    let mut z_parts: [Vec<usize>; 3] = Default::default();
    let mut z_bad = Vec::new();
    for &v in &z {
        match smallest_cyclic_part(g, &masks, v, tau * n as f64) {
            Some(i) => z_parts[i].push(v),
            None => z_bad.push(v),
        }
    }
    let mut z_cyclic: Vec<usize> = z_parts.iter().flatten().copied().collect();
    z_cyclic.sort_unstable();
    let w_prime = [0, 1, 2].map(|i| {
        let mut p = triple.parts[i].clone();
        p.extend_from_slice(&z_parts[i]);
        p.sort_unstable();
        p
    });
    let u_prime = u.iter().copied().filter(|v| z_cyclic.binary_search(v).is_err()).collect();
    ExtremalDecomposition { n, triple: triple.clone(), u, labels, z, z_parts, z_cyclic, z_bad, w_prime, u_prime }
}

/// Vertices labelled `(i, γ)`-cyclic whose in-degree from `W[i−1]` or
/// out-degree into `W[i+1]` falls short of the part size minus `(γ + λ)n`.
pub fn good_degree_violations(g: &OrientedGraph, dec: &ExtremalDecomposition, gamma: f64, lambda: f64) -> Vec<usize> {
    let n = g.vertex_count();
    let masks = dec.triple.masks(n);
    let sizes = dec.triple.sizes();
    let slack = (gamma + lambda) * n as f64;
    (0..n)
        .filter(|&v| match dec.labels[v] {
            VertexLabel::Cyclic(i) => {
                let (prev, next) = ((i + 2) % 3, (i + 1) % 3);
                (g.in_degree_into(v, &masks[prev]) as f64) < sizes[prev] as f64 - slack
                    || (g.out_degree_into(v, &masks[next]) as f64) < sizes[next] as f64 - slack
            }
            VertexLabel::Bad => false,
        })
        .collect()
}
