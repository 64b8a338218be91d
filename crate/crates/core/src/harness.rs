//! Proposition verifiers, sweeps and exhaustive probes, each producing a
//! [`Report`] that serializes deterministically.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exact::{decide_small_exhaustive, find_perfect_tiling, max_tiling, ExhaustiveError, SolveBudget, SolveStatus};
use crate::generators::{extremal_graph, random_with_min_semidegree, ExtremalSpec, GenError};
use crate::graph::OrientedGraph;
use crate::nonextremal::lex_max_tiling;
use crate::par::{map_indexed, Execution};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub parameters: Map<String, Value>,
    pub seed: u64,
    pub records: Vec<Value>,
    pub aggregate: Map<String, Value>,
    pub verdicts: Vec<Verdict>,
    /// Record fields written by [`Report::to_csv`].
    pub csv_columns: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            parameters: Map::new(),
            seed,
            records: Vec::new(),
            aggregate: Map::new(),
            verdicts: Vec::new(),
            csv_columns: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.into(), json!(value));
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.aggregate.insert(key.into(), json!(value));
    }

    pub fn verdict(&mut self, name: &str, passed: bool, detail: String) {
        self.verdicts.push(Verdict { name: name.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are plain data")
    }

    /// One row per record with the declared columns; missing fields are empty.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.csv_columns)?;
        for r in &self.records {
            w.write_record(self.csv_columns.iter().map(|c| match r.get(c) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            }))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("n = {0} is not a multiple of 3 (at least 9)")]
    BadN(usize),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Exhaustive(#[from] ExhaustiveError),
}

/// `#TT ≥ n³/54` whenever `δ⁰ ≥ 7n/18`; `None` when the degree hypothesis fails.
pub fn tt_count_bound_holds(g: &OrientedGraph) -> Option<bool> {
    let n = g.vertex_count();
    (18 * g.min_semidegree() >= 7 * n).then(|| 54 * g.count_transitive_triangles() >= n * n * n)
}

fn tournament_from_bits(n: usize, bits: u64) -> OrientedGraph {
    let mut g = OrientedGraph::new(n);
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = if bits >> k & 1 == 0 { (u, v) } else { (v, u) };
            g.add_arc(a, b).expect("fresh pair");
            k += 1;
        }
    }
    g
}

/// Every vertex of every labeled tournament on 4 vertices lies in a
/// transitive triangle.
pub fn verify_prop_tt4() -> Report {
    let mut report = Report::new("prop_tt4", 0);
    report.csv_columns = vec!["instance".into(), "arcs".into(), "uncovered".into()];
    let mut failures = 0;
    for bits in 0..64u64 {
        let g = tournament_from_bits(4, bits);
        let uncovered: Vec<usize> = (0..4).filter(|&v| g.transitive_triangles_at(v).is_empty()).collect();
        failures += usize::from(!uncovered.is_empty());
        let arcs: Vec<String> = g.arcs().map(|(u, v)| format!("{u}>{v}")).collect();
        report.records.push(json!({ "instance": bits, "arcs": arcs.join(" "), "uncovered": uncovered.len() }));
    }
    report.set("instances", 64);
    report.set("failures", failures);
    report.verdict("every vertex in a transitive triangle", failures == 0, format!("{failures} of 64 tournaments fail"));
    report
}

const VIOLATION_CAP: usize = 32;
const PARTS: [&str; 3] = ["a", "b", "c"];

/// The three transitive-triangle counts of the degree proposition, checked on
/// every arc and every directed path of length two.
pub fn verify_prop_deg(g: &OrientedGraph, label: &str) -> Report {
    let n = g.vertex_count();
    let d0 = if n == 0 { 0 } else { g.min_semidegree() };
    let bound = 3 * d0 as i64 - n as i64;
    let mut report = Report::new("prop_deg", 0).param("graph", label).param("n", n).param("min_semidegree", d0);
    report.csv_columns = vec!["part".into(), "u".into(), "v".into(), "w".into(), "count".into(), "bound".into()];
    let (mut min_a, mut min_b, mut min_c) = (i64::MAX, i64::MAX, i64::MAX);
    let (mut arcs, mut paths) = (0u64, 0u64);
    let mut violations = [0u64; 3];
    let mut note = |report: &mut Report, part: usize, uvw: [Option<usize>; 3], count: i64, need: i64| {
        if count < need {
            violations[part] += 1;
            if report.records.len() < VIOLATION_CAP {
                report.records.push(json!({
                    "part": PARTS[part], "u": uvw[0], "v": uvw[1], "w": uvw[2], "count": count, "bound": need,
                }));
            }
        }
    };
    for (u, v) in g.arcs() {
        arcs += 1;
        let nu = g.neighbors(u);
        let nv = g.neighbors(v);
        let a = nu.intersection(g.in_neighbors(v)).count() as i64;
        let b = g.out_neighbors(u).intersection(&nv).count() as i64;
        min_a = min_a.min(a);
        min_b = min_b.min(b);
        note(&mut report, 0, [Some(u), Some(v), None], a, bound);
        note(&mut report, 1, [Some(u), Some(v), None], b, bound);
        for w in g.out_neighbors(v).ones().filter(|&w| w != u) {
            paths += 1;
            let c = (0..n)
                .filter(|&x| {
                    x != u
                        && x != v
                        && x != w
                        && (g.transitive_triple(x, v, u).is_some() || g.transitive_triple(x, v, w).is_some())
                })
                .count() as i64;
            min_c = min_c.min(c);
            note(&mut report, 2, [Some(u), Some(v), Some(w)], c, 2 * bound);
        }
    }
    report.set("arcs", arcs);
    report.set("paths", paths);
    report.set("bound", bound);
    report.set("min_a", (arcs > 0).then_some(min_a));
    report.set("min_b", (arcs > 0).then_some(min_b));
    report.set("min_c", (paths > 0).then_some(min_c));
    for (k, name) in ["(a) arcs with a common in-neighbour of the head", "(b) arcs with a common out-neighbour of the tail", "(c) paths"]
        .iter()
        .enumerate()
    {
        report.verdict(name, violations[k] == 0, format!("{} violation(s), bound {}", violations[k], if k == 2 { 2 * bound } else { bound }));
    }
    report
}

/// For a cyclic triangle `abc` in the neighbourhood of `x`, at least two of
/// `xab`, `xbc`, `xca` are transitive; all 8 orientations of `x`'s arcs.
pub fn verify_prop_cyctri() -> Report {
    let mut report = Report::new("prop_cyctri", 0);
    report.csv_columns = vec!["case".into(), "out_degree".into(), "transitive_edges".into()];
    let mut failures = 0;
    for case in 0..8u32 {
        let mut g = OrientedGraph::from_arcs(4, [(1, 2), (2, 3), (3, 1)]).expect("cycle");
        for k in 0..3 {
            let (s, t) = if case >> k & 1 == 1 { (0, k + 1) } else { (k + 1, 0) };
            g.add_arc(s, t).expect("fresh pair");
        }
        let transitive = [(1, 2), (2, 3), (3, 1)].iter().filter(|&&(a, b)| g.transitive_triple(0, a, b).is_some()).count();
        failures += usize::from(transitive < 2);
        report.records.push(json!({ "case": case, "out_degree": case.count_ones(), "transitive_edges": transitive }));
    }
    report.set("cases", 8);
    report.set("failures", failures);
    report.verdict("at least two transitive completions", failures == 0, format!("{failures} of 8 cases fail"));
    report
}

/// For each `n`, the semidegree of the extremal construction against both
/// closed forms and the exact solver's verdict on a perfect tiling.
pub fn sweep_extremal_bound(ns: &[usize], budget: SolveBudget, exec: Execution) -> Result<Report, HarnessError> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 9 || n % 3 != 0) {
        return Err(HarnessError::BadN(bad));
    }
    let mut report = Report::new("extremal_bound", 0).param("n", ns).param("node_limit", budget.node_limit);
    report.csv_columns = ["n", "sizes", "min_semidegree", "floor_formula", "ceil_formula", "intro_formula", "status", "nodes"]
        .map(String::from)
        .to_vec();
    let rows = map_indexed(exec, ns.len(), |i| {
        let n = ns[i];
        let spec = ExtremalSpec::new(n).expect("checked above");
        let (g, _) = extremal_graph(n).expect("checked above");
        let out = find_perfect_tiling(&g, budget);
        let status = match out.status {
            SolveStatus::Tiling(_) => "tiling",
            SolveStatus::NoTiling => "no_tiling",
            SolveStatus::BudgetExceeded => "budget_exceeded",
        };
        json!({
            "n": n,
            "sizes": spec.sizes().map(|s| s.to_string()).join("/"),
            "min_semidegree": g.min_semidegree(),
            "floor_formula": spec.floor_bound(),
            "ceil_formula": spec.below_threshold(),
            "intro_formula": spec.introduction_formula(),
            "status": status,
            "nodes": out.stats.nodes,
        })
    });
    let field = |r: &Value, k: &str| r[k].as_u64().expect("numeric field");
    let floor_misses: Vec<u64> = rows.iter().filter(|r| field(r, "min_semidegree") != field(r, "floor_formula")).map(|r| field(r, "n")).collect();
    let ceil_misses: Vec<u64> = rows.iter().filter(|r| field(r, "min_semidegree") != field(r, "ceil_formula")).map(|r| field(r, "n")).collect();
    let tiled: Vec<u64> = rows.iter().filter(|r| r["status"] == "tiling").map(|r| field(r, "n")).collect();
    let undecided: Vec<u64> = rows.iter().filter(|r| r["status"] == "budget_exceeded").map(|r| field(r, "n")).collect();
    report.records = rows;
    report.set("floor_mismatches", &floor_misses);
    report.set("ceil_mismatches", &ceil_misses);
    report.set("undecided", &undecided);
    report.verdict("semidegree equals floor(7n/18) - 1", floor_misses.is_empty(), format!("mismatch at n = {floor_misses:?}"));
    report.verdict("semidegree equals ceil(7n/18) - 1", ceil_misses.is_empty(), format!("mismatch at n = {ceil_misses:?}"));
    report.verdict("no perfect tiling", tiled.is_empty(), format!("tiled at n = {tiled:?}, undecided at n = {undecided:?}"));
    Ok(report)
}

/// Random graphs with `δ⁰ ≥ ⌈7n/18⌉`; instance `i` uses `derive_seed(seed, i)`
/// and `n = ns[i / samples]`. Leftover bounds are asserted only on instances
/// the exact solver finished.
pub fn sweep_near_tiling(
    ns: &[usize],
    samples: usize,
    seed: u64,
    budget: SolveBudget,
    exec: Execution,
) -> Result<Report, HarnessError> {
    let mut report = Report::new("near_tiling", seed).param("n", ns).param("samples", samples).param("node_limit", budget.node_limit);
    report.csv_columns = ["n", "sample", "seed", "min_semidegree", "optimal", "exact_leftover", "lex_leftover", "tt_count", "tt_bound_holds", "nodes"]
        .map(String::from)
        .to_vec();
    let rows = map_indexed(exec, ns.len() * samples, |i| -> Result<Value, GenError> {
        let n = ns[i / samples];
        let s = derive_seed(seed, i as u64);
        let g = random_with_min_semidegree(n, (7 * n).div_ceil(18), s, 1_000_000)?;
        let exact = max_tiling(&g, budget);
        let lex = lex_max_tiling(&g, usize::MAX);
        Ok(json!({
            "n": n,
            "sample": i % samples,
            "seed": s,
            "min_semidegree": g.min_semidegree(),
            "optimal": exact.optimal,
            "exact_leftover": n - 3 * exact.tiling.len(),
            "lex_leftover": lex.leftover,
            "tt_count": g.count_transitive_triangles(),
            "tt_bound_holds": tt_count_bound_holds(&g),
            "nodes": exact.stats.nodes,
        }))
    });
    report.records = rows.into_iter().collect::<Result<_, _>>()?;
    let optimal: Vec<&Value> = report.records.iter().filter(|r| r["optimal"] == true).collect();
    let left = |r: &Value, k: &str| r[k].as_u64().expect("numeric field");
    let worst = optimal.iter().map(|r| left(r, "exact_leftover")).max();
    let over: Vec<u64> = optimal.iter().filter(|r| left(r, "exact_leftover") > 11).map(|r| left(r, "seed")).collect();
    let lex_below: Vec<u64> =
        optimal.iter().filter(|r| left(r, "lex_leftover") < left(r, "exact_leftover")).map(|r| left(r, "seed")).collect();
    let tt_fail: Vec<u64> = report.records.iter().filter(|r| r["tt_bound_holds"] == false).map(|r| left(r, "seed")).collect();
    let optimal_count = optimal.len();
    let budget_exceeded = report.records.len() - optimal_count;
    let worst_lex = report.records.iter().map(|r| left(r, "lex_leftover")).max();
    report.set("instances", report.records.len());
    report.set("optimal", optimal_count);
    report.set("budget_exceeded", budget_exceeded);
    report.set("worst_exact_leftover", worst);
    report.set("worst_lex_leftover", worst_lex);
    report.verdict("leftover at most 11", over.is_empty(), format!("{optimal_count} optimal instance(s), worst {worst:?}, over at seeds {over:?}"));
    report.verdict("local search never beats the optimum", lex_below.is_empty(), format!("violations at seeds {lex_below:?}"));
    report.verdict("#TT >= n^3/54", tt_fail.is_empty(), format!("violations at seeds {tt_fail:?}"));
    Ok(report)
}

/// `(n, δ⁰)` pairs run by the `probe` subcommand by default.
pub const DEFAULT_PROBE_CASES: [(usize, usize); 4] = [(3, 0), (3, 1), (6, 3), (9, 4)];

/// Exhaustive decision of every labeled oriented graph with the given order
/// and minimum semidegree. Infeasible bounds are recorded with zero instances.
pub fn small_exhaustive_probe(cases: &[(usize, usize)], exec: Execution) -> Result<Report, HarnessError> {
    let mut report = Report::new("small_exhaustive", 0).param("cases", cases);
    report.csv_columns = ["n", "min_semidegree", "instances", "tournaments", "tileable", "non_tileable", "non_tileable_tournaments", "budget_exceeded"]
        .map(String::from)
        .to_vec();
    let mut total_non_tileable = 0;
    let mut undecided = 0;
    for &(n, d) in cases {
        let mut row = match decide_small_exhaustive(n, d, exec) {
            Ok(r) => {
                total_non_tileable += r.non_tileable;
                undecided += r.budget_exceeded;
                serde_json::to_value(&r).expect("plain data")
            }
            Err(ExhaustiveError::InfeasibleBound { .. }) => json!({
                "n": n, "min_semidegree": d, "instances": 0, "tournaments": 0, "tileable": 0, "non_tileable": 0,
                "non_tileable_tournaments": 0, "budget_exceeded": 0, "non_tileable_examples": [],
            }),
            Err(e) => return Err(e.into()),
        };
        row["divisible"] = json!(n % 3 == 0);
        report.records.push(row);
    }
    report.set("non_tileable", total_non_tileable);
    report.verdict("every instance decided", undecided == 0, format!("{undecided} undecided"));
    Ok(report)
}
