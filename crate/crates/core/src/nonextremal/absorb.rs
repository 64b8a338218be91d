//! Absorbing sets and the absorber built from them.
//!
//! An absorbing set for an ordered triple `X` is an 18-vertex set `U`
//! disjoint from `X` such that both `G[U]` and `G[U ∪ X]` tile perfectly.
//! The constructive search joins a transitive triangle `t1 t2 t3` to
//! `x1, x2, x3` by three disjoint 2-links; the heads of the links tile `U`,
//! their tails together with `t1 t2 t3` tile `U ∪ X`.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{find_perfect_tiling, SolveBudget};
use crate::graph::{OrientedGraph, Tiling, TransitiveTriangle};
use crate::nonextremal::link::{find_link, LinkSearch};
use crate::par::{map_indexed, Execution};
use crate::seed::{derive_seed, rng};

pub const ABSORBER_SIZE: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorbingSet {
    pub x: [usize; 3],
    pub u: Vec<usize>,
    pub tiling_u: Tiling,
    pub tiling_ux: Tiling,
}

impl AbsorbingSet {
    /// Both stored tilings are perfect on `U` and `U ∪ X` respectively.
    pub fn is_valid_in(&self, g: &OrientedGraph) -> bool {
        let mut u = self.u.clone();
        u.sort_unstable();
        u.dedup();
        if u.len() != ABSORBER_SIZE || self.x.iter().any(|v| u.binary_search(v).is_ok()) {
            return false;
        }
        if self.x[0] == self.x[1] || self.x[1] == self.x[2] || self.x[0] == self.x[2] {
            return false;
        }
        let mut ux = u.clone();
        ux.extend(self.x);
        ux.sort_unstable();
        g.check_tiling(&self.tiling_u).is_ok()
            && self.tiling_u.covered_vertices() == u
            && g.check_tiling(&self.tiling_ux).is_ok()
            && self.tiling_ux.covered_vertices() == ux
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbsorbError {
    #[error("triple repeats vertex {0}")]
    RepeatedVertex(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("triple {triple:?} has {found} disjoint absorbers, {required} required")]
    CoverageFailed { triple: [usize; 3], found: usize, required: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorbSearch {
    pub avoid: Vec<usize>,
    pub seed: u64,
    /// Triangle-plus-links constructions tried before raw sampling.
    pub chain_attempts: usize,
    /// Random 18-sets verified by the exact solver as a fallback.
    pub raw_samples: usize,
    pub time_limit_ms: u64,
}

impl Default for AbsorbSearch {
    fn default() -> Self {
        Self { avoid: Vec::new(), seed: 0, chain_attempts: 48, raw_samples: 32, time_limit_ms: 5_000 }
    }
}

const LINK_BUDGET: usize = 20_000;
const TRIANGLE_TRIES: usize = 400;
const SMALL_SOLVE_NODES: u64 = 200_000;
const CANDIDATES_PER_SLOT: usize = 4;

fn random_triangle(g: &OrientedGraph, pool: &[usize], r: &mut impl rand::Rng) -> Option<TransitiveTriangle> {
    if pool.len() < 3 {
        return None;
    }
    for _ in 0..TRIANGLE_TRIES {
        let picks: Vec<usize> = pool.choose_multiple(r, 3).copied().collect();
        if let Some(t) = TransitiveTriangle::from_vertices(g, picks[0], picks[1], picks[2]) {
            return Some(t);
        }
    }
    None
}

/// Decides whether `a` absorbs `x` and returns the tiling of `G[a ∪ x]`.
pub fn absorbs(g: &OrientedGraph, a: &[usize], x: &[usize; 3]) -> Option<Tiling> {
    let mut vs = a.to_vec();
    vs.extend_from_slice(x);
    let (sub, map) = g.induced(&vs).ok()?;
    find_perfect_tiling(&sub, SolveBudget::nodes(SMALL_SOLVE_NODES)).tiling().map(|t| t.relabel(&map))
}

fn tiling_of(g: &OrientedGraph, vs: &[usize]) -> Option<Tiling> {
    let (sub, map) = g.induced(vs).ok()?;
    find_perfect_tiling(&sub, SolveBudget::nodes(SMALL_SOLVE_NODES)).tiling().map(|t| t.relabel(&map))
}

fn check_triple(g: &OrientedGraph, x: &[usize; 3]) -> Result<(), AbsorbError> {
    for (i, &v) in x.iter().enumerate() {
        if v >= g.vertex_count() {
            return Err(AbsorbError::BadVertex(v));
        }
        if x[..i].contains(&v) {
            return Err(AbsorbError::RepeatedVertex(v));
        }
    }
    Ok(())
}

/// Searches for an absorbing set for `x`, first by the link construction,
/// then by sampling random 18-sets.
pub fn find_absorbing_set(
    g: &OrientedGraph,
    x: [usize; 3],
    search: &AbsorbSearch,
) -> Result<Option<AbsorbingSet>, AbsorbError> {
    check_triple(g, &x)?;
    // A vertex outside every transitive triangle can never be absorbed.
    if x.iter().any(|&v| g.transitive_triangles_at(v).is_empty()) {
        return Ok(None);
    }
    let deadline = Instant::now() + Duration::from_millis(search.time_limit_ms);
    let n = g.vertex_count();
    let mut blocked = FixedBitSet::with_capacity(n);
    for &v in search.avoid.iter().chain(&x) {
        blocked.insert(v);
    }
    let pool: Vec<usize> = (0..n).filter(|&v| !blocked.contains(v)).collect();
    if pool.len() < ABSORBER_SIZE {
        return Ok(None);
    }
    let mut r = rng(search.seed);
    for attempt in 0..search.chain_attempts {
        if Instant::now() >= deadline {
            return Ok(None);
        }
        let Some(f) = random_triangle(g, &pool, &mut r) else { break };
        let ts = f.vertices();
        let mut used: Vec<usize> = search.avoid.iter().copied().chain(x).chain(ts).collect();
        let mut heads = Vec::new();
        let mut tails = vec![f];
        let mut ok = true;
        for i in 0..3 {
            let avoid: Vec<usize> = used.iter().copied().filter(|&v| v != ts[i] && v != x[i]).collect();
            let link = LinkSearch { avoid, seed: derive_seed(search.seed, (attempt * 3 + i) as u64), budget: LINK_BUDGET };
            match find_link(g, ts[i], x[i], 2, &link).expect("order 2 is supported") {
                Some(w) => {
                    used.extend_from_slice(w.interior());
                    heads.extend(w.head_tiling.tiles);
                    tails.extend(w.tail_tiling.tiles);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let tiling_u = Tiling::new(heads);
            let set = AbsorbingSet { x, u: tiling_u.covered_vertices(), tiling_u, tiling_ux: Tiling::new(tails) };
            debug_assert!(set.is_valid_in(g));
            return Ok(Some(set));
        }
    }
    for _ in 0..search.raw_samples {
        if Instant::now() >= deadline {
            break;
        }
        let mut u: Vec<usize> = pool.choose_multiple(&mut r, ABSORBER_SIZE).copied().collect();
        u.sort_unstable();
        let Some(tiling_u) = tiling_of(g, &u) else { continue };
        if let Some(tiling_ux) = absorbs(g, &u, &x) {
            return Ok(Some(AbsorbingSet { x, u, tiling_u, tiling_ux }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorberOptions {
    pub sigma: f64,
    /// Disjoint absorbers required per sampled test triple (capped by the
    /// number of absorbers).
    pub reserve: usize,
    pub test_triples: usize,
    /// Triples whose absorption rate ranks candidate absorbers.
    pub probe_triples: usize,
    pub exec: Execution,
}

impl Default for AbsorberOptions {
    fn default() -> Self {
        Self { sigma: 0.05, reserve: 3, test_triples: 100, probe_triples: 30, exec: Execution::Parallel }
    }
}

impl AbsorberOptions {
    /// Number of 18-vertex absorbers: at most `3σn`, and `|U| ≤ n/2`.
    pub fn absorber_count(&self, n: usize) -> usize {
        ((3.0 * self.sigma * n as f64).floor() as usize).min(n / (2 * ABSORBER_SIZE))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub vertices: Vec<usize>,
    pub tiling: Tiling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub triple: [usize; 3],
    /// Indices into [`Absorber::gadgets`] that absorb the triple, with the witnesses.
    pub absorbers: Vec<(usize, AbsorbingSet)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorber {
    pub seed: u64,
    pub vertices: Vec<usize>,
    pub gadgets: Vec<Gadget>,
    pub required: usize,
    pub registry: Vec<RegistryEntry>,
}

impl Absorber {
    pub fn own_tiling(&self) -> Tiling {
        Tiling::new(self.gadgets.iter().flat_map(|a| a.tiling.tiles.iter().copied()).collect())
    }
}

fn sample_triple(pool: &[usize], r: &mut impl rand::Rng) -> [usize; 3] {
    let v: Vec<usize> = pool.choose_multiple(r, 3).copied().collect();
    let mut t = [v[0], v[1], v[2]];
    if r.random_bool(0.5) {
        t.swap(0, 1);
    }
    t
}

/// Chooses disjoint absorbing 18-sets and registers, for sampled test
/// triples outside them, which sets absorb each triple.
pub fn build_absorber(g: &OrientedGraph, opts: &AbsorberOptions, seed: u64) -> Result<Absorber, AbsorbError> {
    let n = g.vertex_count();
    let k = opts.absorber_count(n);
    let required = opts.reserve.min(k);
    if k == 0 {
        return Ok(Absorber { seed, vertices: Vec::new(), gadgets: Vec::new(), required, registry: Vec::new() });
    }
    let all: Vec<usize> = (0..n).collect();
    let mut r = rng(seed);
    let probes: Vec<[usize; 3]> = (0..opts.probe_triples).map(|_| sample_triple(&all, &mut r)).collect();
    let mut taken = FixedBitSet::with_capacity(n);
    let mut gadgets = Vec::new();
    // Each slot draws fresh candidates avoiding earlier slots and keeps the
    // one absorbing the most probe triples (lowest index on ties).
    for slot in 0..k {
        let avoid: Vec<usize> = taken.ones().collect();
        let free: Vec<usize> = (0..n).filter(|&v| !taken.contains(v)).collect();
        if free.len() < ABSORBER_SIZE + 3 {
            break;
        }
        let targets: Vec<[usize; 3]> = (0..CANDIDATES_PER_SLOT).map(|_| sample_triple(&free, &mut r)).collect();
        let scored = map_indexed(opts.exec, CANDIDATES_PER_SLOT, |i| {
            let search = AbsorbSearch {
                avoid: avoid.clone(),
                seed: derive_seed(seed, (slot * CANDIDATES_PER_SLOT + i) as u64),
                ..AbsorbSearch::default()
            };
            let set = find_absorbing_set(g, targets[i], &search).ok().flatten()?;
            let score = probes
                .iter()
                .filter(|p| p.iter().all(|v| set.u.binary_search(v).is_err() && !taken.contains(*v)))
                .filter(|p| absorbs(g, &set.u, p).is_some())
                .count();
            Some((score, set))
        });
        let best = scored
            .into_iter()
            .flatten()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.0.cmp(&b.0).then(j.cmp(i)))
            .map(|(_, (_, set))| set);
        let Some(set) = best else { break };
        for &v in &set.u {
            taken.insert(v);
        }
        gadgets.push(Gadget { vertices: set.u, tiling: set.tiling_u });
    }
    let outside: Vec<usize> = (0..n).filter(|&v| !taken.contains(v)).collect();
    let tests: Vec<[usize; 3]> = if outside.len() >= 3 {
        (0..opts.test_triples).map(|_| sample_triple(&outside, &mut r)).collect()
    } else {
        Vec::new()
    };
    let registry: Vec<RegistryEntry> = map_indexed(opts.exec, tests.len(), |i| {
        let triple = tests[i];
        let absorbers = gadgets
            .iter()
            .enumerate()
            .filter_map(|(j, gadget)| {
                absorbs(g, &gadget.vertices, &triple).map(|tiling_ux| {
                    (
                        j,
                        AbsorbingSet {
                            x: triple,
                            u: gadget.vertices.clone(),
                            tiling_u: gadget.tiling.clone(),
                            tiling_ux,
                        },
                    )
                })
            })
            .collect();
        RegistryEntry { triple, absorbers }
    });
    if let Some(weakest) = registry.iter().min_by_key(|e| e.absorbers.len()) {
        if weakest.absorbers.len() < required {
            return Err(AbsorbError::CoverageFailed {
                triple: weakest.triple,
                found: weakest.absorbers.len(),
                required,
            });
        }
    }
    if gadgets.len() < required {
        return Err(AbsorbError::CoverageFailed { triple: [0, 0, 0], found: gadgets.len(), required });
    }
    let mut vertices: Vec<usize> = taken.ones().collect();
    vertices.sort_unstable();
    Ok(Absorber { seed, vertices, gadgets, required, registry })
}
