//! Tiling graphs far from the extremal construction: a lexicographic
//! near-tiling, link gadgets, absorbing sets, and the pipeline combining them.

pub mod absorb;
pub mod lex;
pub mod link;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{find_perfect_tiling, SolveBudget};
use crate::graph::{OrientedGraph, Tiling};
use crate::matching::{bipartite_max_matching, BipartiteGraph};
use crate::seed::{derive_seed, rng};

pub use absorb::{
    absorbs, build_absorber, find_absorbing_set, AbsorbError, AbsorbSearch, Absorber, AbsorberOptions,
    AbsorbingSet,
};
pub use lex::{cover_structure_bounds, lex_max_tiling, CoverBounds, LexOutcome, MoveKind, PartialCover};
pub use link::{find_link, link_quadrants, LinkError, LinkSearch, LinkWitness, QuadrantReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Input,
    Absorber,
    NearTiling,
    Absorb,
    Validate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonextremalRun {
    pub tiling: Tiling,
    pub absorber_vertices: usize,
    pub leftover: usize,
    pub trace: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("stage {stage:?} failed: {detail}")]
pub struct StageFailed {
    pub stage: Stage,
    pub detail: String,
    pub trace: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonextremalOptions {
    pub absorber: AbsorberOptions,
    pub move_budget: usize,
    /// Random partitions of the leftover into triples tried before the
    /// direct solve of `G[U ∪ W]`.
    pub partition_attempts: usize,
    pub time_limit_ms: u64,
}

impl Default for NonextremalOptions {
    fn default() -> Self {
        Self { absorber: AbsorberOptions::default(), move_budget: 100_000, partition_attempts: 32, time_limit_ms: 120_000 }
    }
}

struct Tracer {
    trace: Vec<StageRecord>,
}

impl Tracer {
    fn log(&mut self, stage: Stage, detail: String) {
        self.trace.push(StageRecord { stage, detail });
    }

    fn fail(&self, stage: Stage, detail: String) -> StageFailed {
        StageFailed { stage, detail, trace: self.trace.clone() }
    }
}

/// Matches the triples of a partition of `leftover` to distinct absorbers.
fn absorb_by_matching(
    g: &OrientedGraph,
    absorber: &Absorber,
    leftover: &[usize],
    attempts: usize,
    seed: u64,
    deadline: Instant,
) -> Option<Tiling> {
    let gadgets = &absorber.gadgets;
    let t = leftover.len() / 3;
    if t > gadgets.len() {
        return None;
    }
    for attempt in 0..attempts {
        if Instant::now() >= deadline {
            return None;
        }
        let mut order = leftover.to_vec();
        order.shuffle(&mut rng(derive_seed(seed, attempt as u64)));
        let triples: Vec<[usize; 3]> = order.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let mut witness = vec![vec![None; gadgets.len()]; t];
        let mut b = BipartiteGraph::new(t, gadgets.len());
        for (i, x) in triples.iter().enumerate() {
            for (j, gadget) in gadgets.iter().enumerate() {
                if let Some(tiling) = absorbs(g, &gadget.vertices, x) {
                    witness[i][j] = Some(tiling);
                    b.add_edge(i, j);
                }
            }
        }
        let mate = bipartite_max_matching(&b);
        if mate.iter().all(Option::is_some) {
            let mut used = vec![false; gadgets.len()];
            let mut tiles = Vec::new();
            for (i, j) in mate.iter().enumerate() {
                let j = j.expect("all matched");
                used[j] = true;
                tiles.extend(witness[i][j].take().expect("edge has witness").tiles);
            }
            for (_, gadget) in gadgets.iter().enumerate().filter(|(j, _)| !used[*j]) {
                tiles.extend(gadget.tiling.tiles.iter().copied());
            }
            return Some(Tiling::new(tiles));
        }
    }
    None
}

/// Absorber, then a near-tiling of `G − U`, then absorption of the leftover.
/// Every returned tiling has passed validation as perfect.
pub fn nonextremal_tile(g: &OrientedGraph, opts: &NonextremalOptions, seed: u64) -> Result<NonextremalRun, StageFailed> {
    let start = Instant::now();
    let deadline = start + Duration::from_millis(opts.time_limit_ms);
    let n = g.vertex_count();
    let mut tr = Tracer { trace: Vec::new() };
    if !n.is_multiple_of(3) {
        return Err(tr.fail(Stage::Input, format!("n = {n} is not a multiple of 3")));
    }
    tr.log(Stage::Input, format!("n = {n}, seed = {seed}"));

    let absorber = build_absorber(g, &opts.absorber, derive_seed(seed, 0))
        .map_err(|e| tr.fail(Stage::Absorber, e.to_string()))?;
    tr.log(
        Stage::Absorber,
        format!(
            "{} absorbers, |U| = {}, {} test triples, {} required each",
            absorber.gadgets.len(),
            absorber.vertices.len(),
            absorber.registry.len(),
            absorber.required
        ),
    );

    let rest: Vec<usize> = (0..n).filter(|v| absorber.vertices.binary_search(v).is_err()).collect();
    let (sub, map) = g.induced(&rest).expect("distinct in-range vertices");
    let lex = lex_max_tiling(&sub, opts.move_budget);
    let near = lex.cover.tiling().relabel(&map);
    let leftover: Vec<usize> = lex.cover.uncovered_vertices().into_iter().map(|v| map[v]).collect();
    tr.log(
        Stage::NearTiling,
        format!("{} tiles on G - U, {} leftover, {} moves", near.len(), leftover.len(), lex.moves.len()),
    );

    let absorbed = if leftover.is_empty() {
        Some(absorber.own_tiling())
    } else {
        absorb_by_matching(g, &absorber, &leftover, opts.partition_attempts, derive_seed(seed, 1), deadline)
    };
    let absorbed = match absorbed {
        Some(t) => {
            tr.log(Stage::Absorb, format!("leftover matched to absorbers, {} tiles", t.len()));
            t
        }
        None => {
            let mut vs = absorber.vertices.clone();
            vs.extend_from_slice(&leftover);
            let (sub, map) = g.induced(&vs).expect("disjoint vertex sets");
            let remaining = deadline.saturating_duration_since(Instant::now()).as_millis().max(1) as u64;
            let out = find_perfect_tiling(&sub, SolveBudget::time_ms(remaining));
            match out.tiling() {
                Some(t) => {
                    tr.log(Stage::Absorb, format!("G[U ∪ W] solved directly ({} nodes)", out.stats.nodes));
                    t.relabel(&map)
                }
                None => {
                    return Err(tr.fail(
                        Stage::Absorb,
                        format!("no tiling of G[U ∪ W] with |W| = {}: {:?}", leftover.len(), out.status),
                    ))
                }
            }
        }
    };

    let mut tiles = near.tiles;
    tiles.extend(absorbed.tiles);
    let tiling = Tiling::new(tiles);
    match g.check_tiling(&tiling) {
        Ok(check) if check.perfect => {}
        other => return Err(tr.fail(Stage::Validate, format!("{other:?}"))),
    }
    tr.log(Stage::Validate, format!("perfect, {:.0} ms", start.elapsed().as_secs_f64() * 1e3));
    Ok(NonextremalRun { tiling, absorber_vertices: absorber.vertices.len(), leftover: leftover.len(), trace: tr.trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{extremal_graph, random_with_min_semidegree};

    #[test]
    fn transitive_tournament_pipeline() {
        let g = OrientedGraph::transitive_tournament(60);
        let run = nonextremal_tile(&g, &NonextremalOptions::default(), 0).unwrap();
        assert!(g.check_tiling(&run.tiling).unwrap().perfect);
    }

    #[test]
    fn extremal_graph_fails_a_stage() {
        let (g, _) = extremal_graph(18).unwrap();
        let err = nonextremal_tile(&g, &NonextremalOptions::default(), 0).unwrap_err();
        assert_eq!(err.stage, Stage::Absorb);
        let bad = OrientedGraph::transitive_tournament(10);
        assert_eq!(nonextremal_tile(&bad, &NonextremalOptions::default(), 0).unwrap_err().stage, Stage::Input);
    }

    #[test]
    fn random_dense_pipeline() {
        for (n, s) in [(36usize, 1u64), (54, 2), (72, 3)] {
            let d = (7 * n).div_ceil(18);
            let g = random_with_min_semidegree(n, d, s, 1_000_000).unwrap();
            let run = nonextremal_tile(&g, &NonextremalOptions::default(), s).unwrap();
            assert!(g.check_tiling(&run.tiling).unwrap().perfect);
        }
    }

    #[test]
    fn truncated_near_tiling_is_absorbed() {
        let g = random_with_min_semidegree(120, 47, 5, 1_000_000).unwrap();
        let opts = NonextremalOptions { move_budget: 20, ..NonextremalOptions::default() };
        let run = nonextremal_tile(&g, &opts, 5).unwrap();
        assert!(run.leftover > 0);
        assert!(run.trace.iter().any(|r| r.stage == Stage::Absorb && r.detail.contains("matched to absorbers")), "{:?}", run.trace);
        assert!(g.check_tiling(&run.tiling).unwrap().perfect);
    }
}
