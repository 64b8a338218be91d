//! The three collections of disjoint transitive triangles that bring the
//! decomposition into the shape required by the completion step.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::structure::ExtremalDecomposition;
use crate::graph::{vertex_mask, OrientedGraph, TransitiveTriangle};
use crate::matching::{bipartite_max_matching, max_matching, BipartiteGraph, UndirectedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deficit {
    /// Fewer disjoint edges than required between (or inside) the named sets.
    Edges { between: String, needed: usize, found: usize },
    /// Some edge could not be completed to a triangle with an unused vertex.
    Completion { edge: (usize, usize), candidates: usize, unmatched: usize },
    Property { name: String, detail: String },
}

impl std::fmt::Display for Deficit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Deficit::Edges { between, needed, found } => write!(f, "{between}: needed {needed} disjoint edges, found {found}"),
            Deficit::Completion { edge, candidates, unmatched } => write!(
                f,
                "{unmatched} edge(s) left without a completing vertex, e.g. {edge:?} with {candidates} candidate(s)"
            ),
            Deficit::Property { name, detail } => write!(f, "{name} violated: {detail}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum BalanceError {
    #[error("balancing failed: {0}")]
    BalanceFailed(Deficit),
    #[error("no standard triangle absorbs bad vertex {0}")]
    AbsorbFailed(usize),
    #[error("equalizing failed: {0}")]
    EqualizeFailed(Deficit),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub stage: usize,
    pub holds: bool,
    pub detail: String,
}

/// `t[0]`, `t[1]`, `t[2]` are the collections built by the three stages.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancingPlan {
    /// `|W'| − 2n/3`.
    pub c: i64,
    pub t: [Vec<TransitiveTriangle>; 3],
    /// Whether the three cycle edges were added in the last stage.
    pub cycle_edges_used: bool,
    pub checks: Vec<PropertyCheck>,
}

impl BalancingPlan {
    /// Vertices covered by the first `stages` collections.
    pub fn used(&self, n: usize, stages: usize) -> FixedBitSet {
        let mut mask = FixedBitSet::with_capacity(n);
        for t in self.t.iter().take(stages).flatten() {
            for v in t.vertices() {
                mask.insert(v);
            }
        }
        mask
    }

    pub fn triangles(&self) -> impl Iterator<Item = &TransitiveTriangle> {
        self.t.iter().flatten()
    }

    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    fn check(&mut self, name: &str, stage: usize, holds: bool, detail: String) -> bool {
        self.checks.push(PropertyCheck { name: name.into(), stage, holds, detail });
        holds
    }
}

fn remaining(set: &[usize], used: &FixedBitSet) -> Vec<usize> {
    set.iter().copied().filter(|&v| !used.contains(v)).collect()
}

fn w_prime_all(dec: &ExtremalDecomposition) -> Vec<usize> {
    let mut all: Vec<usize> = dec.w_prime.iter().flatten().copied().collect();
    all.sort_unstable();
    all
}

fn p1(plan: &mut BalancingPlan, dec: &ExtremalDecomposition, stage: usize) -> bool {
    let used = plan.used(dec.n, stage);
    let w = remaining(&w_prime_all(dec), &used).len();
    let u = remaining(&dec.u_prime, &used).len();
    plan.check("P1", stage, w == 2 * u, format!("|W' \\ Y| = {w}, |U' \\ Y| = {u}"))
}

/// Matches each edge to a distinct vertex of `pool` forming a transitive
/// triangle with it.
fn complete_edges(
    g: &OrientedGraph,
    edges: &[(usize, usize)],
    pool: &[usize],
) -> Result<Vec<TransitiveTriangle>, Deficit> {
    let mut b = BipartiteGraph::new(edges.len(), pool.len());
    for (e, &(x, y)) in edges.iter().enumerate() {
        for (k, &v) in pool.iter().enumerate() {
            if g.transitive_triple(x, y, v).is_some() {
                b.add_edge(e, k);
            }
        }
    }
    let mate = bipartite_max_matching(&b);
    let unmatched: Vec<usize> = (0..edges.len()).filter(|&e| mate[e].is_none()).collect();
    if let Some(&first) = unmatched.iter().min_by_key(|&&e| (b.left_degree(e), e)) {
        return Err(Deficit::Completion { edge: edges[first], candidates: b.left_degree(first), unmatched: unmatched.len() });
    }
    Ok(edges
        .iter()
        .zip(&mate)
        .map(|(&(x, y), k)| g.transitive_triple(x, y, pool[k.expect("all matched")]).expect("edge checked"))
        .collect())
}

/// Disjoint edges of `G[set]`, lowest-id first within a maximum matching.
fn matching_inside(g: &OrientedGraph, set: &[usize]) -> Vec<(usize, usize)> {
    let h = UndirectedGraph::underlying(g, set);
    let mut edges: Vec<(usize, usize)> = max_matching(&h)
        .pairs
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (set[a], set[b]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Disjoint `a`–`b` edges with `a ∈ left`, `b ∈ right`.
fn matching_between(g: &OrientedGraph, left: &[usize], right: &[usize]) -> Vec<(usize, usize)> {
    let mut b = BipartiteGraph::new(left.len(), right.len());
    for (i, &x) in left.iter().enumerate() {
        for (j, &y) in right.iter().enumerate() {
            if g.adjacent(x, y) {
                b.add_edge(i, j);
            }
        }
    }
    bipartite_max_matching(&b)
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (left[i], right[j])))
        .collect()
}

/// First stage: `|c|` triangles that restore `|W' \ Y| = 2|U' \ Y|`. For
/// `c > 0` they lie inside `W'` and use edges from oversized parts; for
/// `c < 0` each has one vertex in `W'` and an edge inside `U \ Z`.
pub fn balance_stage1(g: &OrientedGraph, dec: &ExtremalDecomposition) -> Result<BalancingPlan, BalanceError> {
    let n = dec.n;
    let w_all = w_prime_all(dec);
    let c = w_all.len() as i64 - (2 * n / 3) as i64;
    let mut plan = BalancingPlan { c, ..Default::default() };
    if c > 0 {
        let cap = 2 * n / 9;
        let mut edges = Vec::new();
        let mut need = c as usize;
        for part in &dec.w_prime {
            if need == 0 || part.len() <= cap {
                continue;
            }
            let take = (part.len() - cap).min(need);
            let found = matching_inside(g, part);
            edges.extend(found.iter().take(take));
            need -= take.min(found.len());
        }
        if need > 0 {
            return Err(BalanceError::BalanceFailed(Deficit::Edges {
                between: "oversized parts of W'".into(),
                needed: c as usize,
                found: c as usize - need,
            }));
        }
        let ends = vertex_mask(n, &edges.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>());
        let pool = remaining(&w_all, &ends);
        plan.t[0] = complete_edges(g, &edges, &pool).map_err(BalanceError::BalanceFailed)?;
    } else if c < 0 {
        let zmask = vertex_mask(n, &dec.z);
        let u2 = remaining(&dec.u, &zmask);
        let found = matching_inside(g, &u2);
        let need = c.unsigned_abs() as usize;
        if found.len() < need {
            return Err(BalanceError::BalanceFailed(Deficit::Edges {
                between: "U \\ Z".into(),
                needed: need,
                found: found.len(),
            }));
        }
        plan.t[0] = complete_edges(g, &found[..need], &w_all).map_err(BalanceError::BalanceFailed)?;
    }
    if !p1(&mut plan, dec, 1) {
        let detail = plan.checks.last().expect("just pushed").detail.clone();
        return Err(BalanceError::BalanceFailed(Deficit::Property { name: "P1".into(), detail }));
    }
    Ok(plan)
}

/// Second stage: one standard triangle (two `W'` vertices) per vertex of `Z'`
/// not yet covered, lowest ids first.
pub fn absorb_bad_vertices(
    g: &OrientedGraph,
    dec: &ExtremalDecomposition,
    mut plan: BalancingPlan,
) -> Result<BalancingPlan, BalanceError> {
    let n = dec.n;
    let mut used = plan.used(n, 1);
    let w_all = w_prime_all(dec);
    plan.t[1].clear();
    for &z in &dec.z_bad {
        if used.contains(z) {
            continue;
        }
        let free: Vec<usize> = w_all.iter().copied().filter(|&v| !used.contains(v) && g.adjacent(z, v)).collect();
        let tri = free
            .iter()
            .enumerate()
            .find_map(|(i, &a)| free[i + 1..].iter().find_map(|&b| g.transitive_triple(z, a, b)))
            .ok_or(BalanceError::AbsorbFailed(z))?;
        for v in tri.vertices() {
            used.insert(v);
        }
        plan.t[1].push(tri);
    }
    let covered = dec.z_bad.iter().all(|&z| used.contains(z));
    plan.check("P2", 2, covered, format!("|Z'| = {}", dec.z_bad.len()));
    if !p1(&mut plan, dec, 2) {
        let detail = plan.checks.last().expect("just pushed").detail.clone();
        return Err(BalanceError::EqualizeFailed(Deficit::Property { name: "P1".into(), detail }));
    }
    Ok(plan)
}

/// Third stage: standard triangles on cross edges that equalize the parts and
/// make the residual vertex count divisible by 18; then P1 and P3–P5 are
/// certified with `τ` as the bound of P3.
pub fn equalize_and_divide(
    g: &OrientedGraph,
    dec: &ExtremalDecomposition,
    mut plan: BalancingPlan,
    tau: f64,
) -> Result<BalancingPlan, BalanceError> {
    let n = dec.n;
    let fail = |d| Err(BalanceError::EqualizeFailed(d));
    let y2 = plan.used(n, 2);
    let parts: [Vec<usize>; 3] = [0, 1, 2].map(|i| remaining(&dec.w_prime[i], &y2));
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| (parts[i].len(), i));
    let [p1_, p2_, p3_] = order;
    let (s1, s2, s3) = (parts[p1_].len(), parts[p2_].len(), parts[p3_].len());
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let m1 = matching_between(g, &parts[p3_], &parts[p1_]);
    if m1.len() < s3 - s2 {
        return fail(Deficit::Edges { between: format!("W{}'' and W{}''", p3_ + 1, p1_ + 1), needed: s3 - s2, found: m1.len() });
    }
    edges.extend_from_slice(&m1[..s3 - s2]);
    let taken = vertex_mask(n, &edges.iter().map(|e| e.0).collect::<Vec<_>>());
    let m2 = matching_between(g, &remaining(&parts[p3_], &taken), &parts[p2_]);
    if m2.len() < s3 - s1 {
        return fail(Deficit::Edges { between: format!("W{}'' and W{}''", p3_ + 1, p2_ + 1), needed: s3 - s1, found: m2.len() });
    }
    edges.extend_from_slice(&m2[..s3 - s1]);
    let residual = n - y2.count_ones(..) - 3 * edges.len();
    plan.cycle_edges_used = residual % 18 == 9;
    if plan.cycle_edges_used {
        let mut ends = vertex_mask(n, &edges.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>());
        for i in 0..3 {
            let next = (i + 1) % 3;
            let e = parts[i]
                .iter()
                .filter(|&&a| !ends.contains(a))
                .find_map(|&a| parts[next].iter().find(|&&b| !ends.contains(b) && g.adjacent(a, b)).map(|&b| (a, b)));
            let Some((a, b)) = e else {
                return fail(Deficit::Edges { between: format!("W{}'' and W{}''", i + 1, next + 1), needed: 1, found: 0 });
            };
            ends.insert(a);
            ends.insert(b);
            edges.push((a, b));
        }
    }
    let pool = remaining(&dec.u_prime, &y2);
    plan.t[2] = complete_edges(g, &edges, &pool).map_err(BalanceError::EqualizeFailed)?;

    let y3 = plan.used(n, 3);
    let sizes: Vec<usize> = dec.w_prime.iter().map(|p| remaining(p, &y3).len()).collect();
    let rest = n - y3.count_ones(..);
    let bound = tau * n as f64;
    let checks = [
        p1(&mut plan, dec, 3),
        plan.check("P3", 3, y3.count_ones(..) as f64 <= bound, format!("|Y3| = {}, τn = {bound:.2}", y3.count_ones(..))),
        plan.check("P4", 3, sizes.iter().all(|&s| s == sizes[0]), format!("residual part sizes {sizes:?}")),
        plan.check("P5", 3, rest.is_multiple_of(18), format!("|V \\ Y3| = {rest}")),
    ];
    if let Some(bad) = checks.iter().position(|ok| !ok) {
        let c = &plan.checks[plan.checks.len() - 4 + bad];
        return fail(Deficit::Property { name: c.name.clone(), detail: c.detail.clone() });
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::structure::{classify_vertices, CyclicTriple};
    use crate::generators::{c_family_graph, extremal_graph, near_extremal_graph};

    fn planted(g: &OrientedGraph, parts: [&[usize]; 3], tau: f64) -> ExtremalDecomposition {
        let triple = CyclicTriple { parts: parts.map(|p| p.to_vec()) };
        classify_vertices(g, &triple, 0.05, tau)
    }

    #[test]
    fn balanced_family_needs_no_triangles() {
        let (g, spec) = c_family_graph(2, 1);
        let dec = planted(&g, spec.w_parts(), 0.05);
        let plan = balance_stage1(&g, &dec).unwrap();
        assert_eq!(plan.c, 0);
        let plan = absorb_bad_vertices(&g, &dec, plan).unwrap();
        let plan = equalize_and_divide(&g, &dec, plan, 0.05).unwrap();
        assert!(plan.triangles().next().is_none());
        assert!(!plan.cycle_edges_used);
        assert!(plan.all_checks_hold());
    }

    #[test]
    fn extremal_graph_has_no_edge_to_spend() {
        let (g, p) = extremal_graph(18).unwrap();
        let dec = planted(&g, ["W1", "W2", "W3"].map(|b| p.block(b).unwrap()), 0.05);
        assert!(matches!(balance_stage1(&g, &dec), Err(BalanceError::BalanceFailed(Deficit::Edges { .. }))));
    }

    #[test]
    fn surplus_and_deficit_of_w() {
        // |W| = 2n/3 − 2 with a dense U; |W| = 2n/3 + 1 with arcs inside W3.
        let (g, p) = near_extremal_graph([12, 12, 10], 20, 0.9, 3);
        let dec = planted(&g, ["W1", "W2", "W3"].map(|b| p.block(b).unwrap()), 0.3);
        let plan = balance_stage1(&g, &dec).unwrap();
        assert_eq!(plan.c, -2);
        assert!(plan.t[0].iter().all(|t| t.vertices().iter().filter(|&&v| v < 34).count() == 1));
        let plan = absorb_bad_vertices(&g, &dec, plan).unwrap();
        let plan = equalize_and_divide(&g, &dec, plan, 0.5).unwrap();
        assert!(plan.all_checks_hold(), "{:?}", plan.checks);

        let (mut g, p) = near_extremal_graph([12, 12, 13], 17, 0.5, 5);
        let w3 = p.block("W3").unwrap().to_vec();
        for k in 0..6 {
            g.add_arc(w3[2 * k], w3[2 * k + 1]).unwrap();
        }
        let dec = planted(&g, ["W1", "W2", "W3"].map(|b| p.block(b).unwrap()), 0.5);
        let plan = balance_stage1(&g, &dec).unwrap();
        assert_eq!(plan.c, 1);
        assert!(plan.t[0][0].vertices().iter().all(|v| *v < 37));
    }

    #[test]
    fn bad_vertex_without_triangle_is_reported() {
        // z keeps two in-arcs and two out-arcs into the independent part W1 only.
        let (mut g, spec) = c_family_graph(1, 0);
        let z = spec.u()[0];
        for w in 0..12 {
            g.remove_arc(w, z);
            g.remove_arc(z, w);
        }
        let w1 = spec.w_parts()[0].to_vec();
        g.add_arc(w1[0], z).unwrap();
        g.add_arc(w1[1], z).unwrap();
        g.add_arc(z, w1[2]).unwrap();
        g.add_arc(z, w1[3]).unwrap();
        let dec = planted(&g, spec.w_parts(), 0.05);
        assert_eq!(dec.z_bad, vec![z]);
        let plan = balance_stage1(&g, &dec).unwrap();
        assert_eq!(absorb_bad_vertices(&g, &dec, plan), Err(BalanceError::AbsorbFailed(z)));
    }

    #[test]
    fn unequal_parts_break_p3() {
        let (g, p) = near_extremal_graph([8, 10, 12], 15, 0.5, 2);
        let dec = planted(&g, ["W1", "W2", "W3"].map(|b| p.block(b).unwrap()), 0.05);
        let plan = balance_stage1(&g, &dec).unwrap();
        let plan = absorb_bad_vertices(&g, &dec, plan).unwrap();
        let err = equalize_and_divide(&g, &dec, plan, 0.05).unwrap_err();
        assert!(matches!(err, BalanceError::EqualizeFailed(Deficit::Property { ref name, .. }) if name == "P3"), "{err:?}");
    }
}
