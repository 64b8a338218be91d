//! Tiling graphs that are close to the extremal construction: a large
//! transitive-triangle-free set is split into a cyclic triple, bad vertices
//! are absorbed, part sizes are equalized, and a matching argument finishes.

pub mod balance;
pub mod finish;
pub mod structure;

pub use balance::{absorb_bad_vertices, balance_stage1, equalize_and_divide, BalanceError, BalancingPlan, Deficit, PropertyCheck};
pub use finish::{finish_tiling, FinishDiagnostic, FinishError, FinishReport};
pub use structure::{
    classify_vertices, cyclic_partition, find_tt3_free_witness, good_degree_violations, CyclicTriple,
    ExtremalDecomposition, NotFound, PartitionError, VertexLabel,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{vertex_mask, OrientedGraph, Tiling};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalConfig {
    pub preset: String,
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub beta: f64,
    pub finish_retries: usize,
    pub exec: Execution,
}

impl ExtremalConfig {
    pub fn desk() -> Self {
        Self {
            preset: "desk".into(),
            alpha: 0.01,
            tau: 0.05,
            gamma: 0.05,
            lambda: 0.05,
            beta: 1.0 / 24.0,
            finish_retries: 64,
            exec: Execution::default(),
        }
    }

    /// `β = 1/24`, `τ = β/288`, `α = τ³`, `γ = λ = 2τ`.
    pub fn paper() -> Self {
        let beta: f64 = 1.0 / 24.0;
        let tau = beta / 288.0;
        Self {
            preset: "paper".into(),
            alpha: tau.powi(3),
            tau,
            gamma: 2.0 * tau,
            lambda: 2.0 * tau,
            beta,
            finish_retries: 64,
            exec: Execution::default(),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(Self::desk()),
            "paper" => Some(Self::paper()),
            _ => None,
        }
    }

    /// `16·18·τ`, the closeness the completion step is invoked with. Logged
    /// next to `beta`; neither is derived from the other.
    pub fn beta_claim(&self) -> f64 {
        16.0 * 18.0 * self.tau
    }

    /// Smallest witness size `⌈(2/3 − α)n⌉` accepted as extremal.
    pub fn witness_size(&self, n: usize) -> usize {
        ((2.0 / 3.0 - self.alpha) * n as f64 - 1e-9).ceil().max(0.0) as usize
    }
}

impl Default for ExtremalConfig {
    fn default() -> Self {
        Self::desk()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalStage {
    Input,
    Witness,
    Partition,
    Classify,
    Balance,
    AbsorbBad,
    Equalize,
    Finish,
    Validate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: ExtremalStage,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalRun {
    pub tiling: Tiling,
    pub decomposition: ExtremalDecomposition,
    pub plan: BalancingPlan,
    pub finish_retry: usize,
    pub trace: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ExtremalError {
    #[error("not extremal: {0}")]
    NotExtremal(NotFound),
    #[error("stage {stage:?} failed: {detail}")]
    StageFailed { stage: ExtremalStage, detail: String, trace: Vec<StageRecord> },
}

/// Runs the whole pipeline. Every returned tiling has been validated as
/// perfect on `g`.
pub fn extremal_tile(g: &OrientedGraph, config: &ExtremalConfig, seed: u64) -> Result<ExtremalRun, ExtremalError> {
    let n = g.vertex_count();
    let mut trace = Vec::new();
    let log = |trace: &mut Vec<StageRecord>, stage, detail: String| trace.push(StageRecord { stage, detail });
    let fail = |stage, detail: String, trace: Vec<StageRecord>| Err(ExtremalError::StageFailed { stage, detail, trace });

    if n == 0 || !n.is_multiple_of(3) {
        return fail(ExtremalStage::Input, format!("n = {n} is not a positive multiple of 3"), trace);
    }
    log(
        &mut trace,
        ExtremalStage::Input,
        format!(
            "n = {n}, preset {}, alpha = {}, tau = {}, gamma = {}, lambda = {}, beta = {}, beta_claim = {}",
            config.preset,
            config.alpha,
            config.tau,
            config.gamma,
            config.lambda,
            config.beta,
            config.beta_claim()
        ),
    );
    let w = find_tt3_free_witness(g, config.witness_size(n)).map_err(ExtremalError::NotExtremal)?;
    log(&mut trace, ExtremalStage::Witness, format!("|W| = {} (required {})", w.len(), config.witness_size(n)));

    let triple = match cyclic_partition(g, &w) {
        Ok(t) => t,
        Err(e) => return fail(ExtremalStage::Partition, e.to_string(), trace),
    };
    log(&mut trace, ExtremalStage::Partition, format!("part sizes {:?}", triple.sizes()));

    let dec = classify_vertices(g, &triple, config.gamma, config.tau);
    let bad = dec.labels.iter().filter(|l| **l == VertexLabel::Bad).count();
    log(
        &mut trace,
        ExtremalStage::Classify,
        format!(
            "|U| = {}, gamma-bad = {bad}, |Z| = {}, |Z''| = {}, |Z'| = {}, W' sizes {:?}, good-degree violations {}",
            dec.u.len(),
            dec.z.len(),
            dec.z_cyclic.len(),
            dec.z_bad.len(),
            dec.w_prime.iter().map(Vec::len).collect::<Vec<_>>(),
            good_degree_violations(g, &dec, config.gamma, config.lambda).len()
        ),
    );

    let plan = match balance_stage1(g, &dec) {
        Ok(p) => p,
        Err(e) => return fail(ExtremalStage::Balance, e.to_string(), trace),
    };
    log(&mut trace, ExtremalStage::Balance, format!("c = {}, {} triangle(s)", plan.c, plan.t[0].len()));
    let plan = match absorb_bad_vertices(g, &dec, plan) {
        Ok(p) => p,
        Err(e) => return fail(ExtremalStage::AbsorbBad, e.to_string(), trace),
    };
    log(&mut trace, ExtremalStage::AbsorbBad, format!("{} triangle(s)", plan.t[1].len()));
    let plan = match equalize_and_divide(g, &dec, plan, config.tau) {
        Ok(p) => p,
        Err(e) => return fail(ExtremalStage::Equalize, e.to_string(), trace),
    };
    log(
        &mut trace,
        ExtremalStage::Equalize,
        format!("{} triangle(s), cycle edges used: {}", plan.t[2].len(), plan.cycle_edges_used),
    );

    let used = plan.used(n, 3);
    let parts = [0, 1, 2].map(|i| dec.w_prime[i].iter().copied().filter(|&v| !used.contains(v)).collect::<Vec<_>>());
    let u: Vec<usize> = dec.u_prime.iter().copied().filter(|&v| !used.contains(v)).collect();
    let report = match finish_tiling(g, &parts, &u, seed, config.finish_retries, config.exec) {
        Ok(r) => r,
        Err(e) => {
            let detail = match &e {
                FinishError::FinishFailed { diagnostic, .. } => format!("{e}; diagnostic {diagnostic:?}"),
                _ => e.to_string(),
            };
            return fail(ExtremalStage::Finish, detail, trace);
        }
    };
    log(&mut trace, ExtremalStage::Finish, format!("retry {}, {} tile(s)", report.retry, report.tiling.len()));

    let mut tiles: Vec<_> = plan.triangles().copied().collect();
    tiles.extend(report.tiling.tiles.iter().copied());
    let tiling = Tiling::new(tiles);
    match g.check_tiling(&tiling) {
        Ok(check) if check.perfect => {}
        Ok(_) => {
            let covered = vertex_mask(n, &tiling.covered_vertices());
            let missing = (0..n).find(|&v| !covered.contains(v)).expect("not perfect");
            return fail(ExtremalStage::Validate, format!("vertex {missing} uncovered"), trace);
        }
        Err(v) => return fail(ExtremalStage::Validate, format!("{v:?}"), trace),
    }
    log(&mut trace, ExtremalStage::Validate, format!("perfect tiling with {} tiles", tiling.len()));
    Ok(ExtremalRun { tiling, decomposition: dec, plan, finish_retry: report.retry, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{c_family_graph, extremal_graph, perturb};

    #[test]
    fn presets() {
        let p = ExtremalConfig::paper();
        assert!((p.tau - 1.0 / 6912.0).abs() < 1e-15);
        assert!((p.alpha - p.tau.powi(3)).abs() < 1e-24);
        assert!((p.beta_claim() - 16.0 * 18.0 / 6912.0).abs() < 1e-12);
        assert_eq!(ExtremalConfig::preset("desk"), Some(ExtremalConfig::desk()));
        assert_eq!(ExtremalConfig::preset("other"), None);
        assert_eq!(ExtremalConfig::desk().witness_size(18), 12);
        assert_eq!(p.witness_size(18), 12);
    }

    #[test]
    fn family_members_tile() {
        let cfg = ExtremalConfig::desk();
        for m in 1..=4 {
            let (g, _) = c_family_graph(m, 11 * m as u64);
            let run = extremal_tile(&g, &cfg, 5).unwrap();
            assert_eq!(run.tiling.len(), 6 * m);
            assert_eq!(run.trace.last().unwrap().stage, ExtremalStage::Validate);
        }
        let (g, _) = c_family_graph(4, 2);
        let g = perturb(&g, 1, 3);
        assert!(g.check_tiling(&extremal_tile(&g, &cfg, 0).unwrap().tiling).unwrap().perfect);
    }

    #[test]
    fn planted_bad_vertex_is_absorbed() {
        // z receives arcs from 24 vertices of each of W1 and W2 and nothing else.
        let (mut g, spec) = c_family_graph(8, 1);
        let z = spec.u()[0];
        for w in 0..96 {
            g.remove_arc(w, z);
            g.remove_arc(z, w);
        }
        for part in &spec.w_parts()[..2] {
            for &w in &part[..24] {
                g.add_arc(w, z).unwrap();
            }
        }
        let cfg = ExtremalConfig { tau: 0.15, ..ExtremalConfig::desk() };
        let run = extremal_tile(&g, &cfg, 2).unwrap();
        assert_eq!(run.decomposition.z_bad, vec![z]);
        assert_eq!(run.plan.t[1].len(), 1);
        assert!(run.plan.t[1][0].contains(z));
        assert!(run.plan.all_checks_hold());
    }

    #[test]
    fn extremal_graph_is_refused() {
        for n in [18, 27, 36] {
            let (g, _) = extremal_graph(n).unwrap();
            match extremal_tile(&g, &ExtremalConfig::desk(), 0) {
                Err(ExtremalError::StageFailed { stage, .. }) => assert_eq!(stage, ExtremalStage::Balance),
                other => panic!("n = {n}: {other:?}"),
            }
        }
    }

    #[test]
    fn short_circuits() {
        let g = OrientedGraph::transitive_tournament(18);
        assert!(matches!(extremal_tile(&g, &ExtremalConfig::desk(), 0), Err(ExtremalError::NotExtremal(_))));
        let g = OrientedGraph::transitive_tournament(10);
        assert!(matches!(
            extremal_tile(&g, &ExtremalConfig::desk(), 0),
            Err(ExtremalError::StageFailed { stage: ExtremalStage::Input, .. })
        ));
    }
}
