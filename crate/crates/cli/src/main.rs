//! `tt3`: generators, solvers and experiment harness for transitive-triangle
//! tilings. Exit code 0 when every verdict passes, 1 when one fails, 2 on
//! usage or input errors.

use std::fs;
use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tt3_core::exact::{find_perfect_tiling, max_tiling, SolveBudget, SolveStatus};
use tt3_core::extremal::{extremal_tile, ExtremalConfig, ExtremalError};
use tt3_core::format::{read_graph, write_graph};
use tt3_core::generators::{
    c_family_graph, cyclic_blowup, extremal_graph, near_extremal_graph, perturb, random_oriented_graph,
    random_with_min_semidegree,
};
use tt3_core::harness::{
    small_exhaustive_probe, sweep_extremal_bound, sweep_near_tiling, verify_prop_cyctri, verify_prop_deg, verify_prop_tt4,
    Report, DEFAULT_PROBE_CASES,
};
use tt3_core::nonextremal::{
    cover_structure_bounds, find_absorbing_set, find_link, lex_max_tiling, link_quadrants, nonextremal_tile, AbsorbSearch,
    LinkSearch, NonextremalOptions,
};
use tt3_core::par::{configure_threads, Execution};
use tt3_core::{OrientedGraph, Tiling, VertexSetPartition};

#[derive(Parser)]
#[command(name = "tt3", version, about = "Transitive-triangle tilings of oriented graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit for solver calls, in milliseconds.
    #[arg(long, global = true, default_value_t = 60_000)]
    budget_ms: u64,
    #[arg(long, global = true, env = "TT3_THREADS")]
    threads: Option<usize>,
    /// Run data-parallel loops on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON report (or, for `gen`, the graph) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the CSV projection of the report's records to this path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph in the text format; `--out g.txt` also writes `g.txt.partition.json`.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Delete arcs so that no vertex loses more than this many.
        #[arg(long, global = true, default_value_t = 0)]
        perturb: usize,
    },
    /// Exact perfect or maximum tiling.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Perfect)]
        mode: Mode,
        /// Search-node limit (in addition to `--budget-ms`).
        #[arg(long)]
        nodes: Option<u64>,
    },
    /// Lexicographic local search; `--pipeline` runs absorber, near tiling and absorption.
    NearTile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        moves: usize,
        #[arg(long)]
        pipeline: bool,
    },
    /// Search an absorbing 18-set for a triple.
    Absorb {
        #[arg(long)]
        input: PathBuf,
        /// Three vertices, e.g. `0,1,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        triple: Vec<usize>,
    },
    /// Search a p-link between two vertices.
    Link {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
    },
    /// Structured tiling of graphs close to the extremal construction.
    Extremal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Preset::Desk)]
        preset: Preset,
    },
    /// Check one of the small propositions.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Seeded parameter sweeps with JSON and CSV reports.
    Sweep {
        #[command(subcommand)]
        what: Sweep,
    },
    /// Decide every small oriented graph with a given minimum semidegree.
    Probe {
        /// `n:d` pairs, e.g. `3:1,9:4`.
        #[arg(long, value_delimiter = ',')]
        cases: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Five-part construction with no perfect tiling.
    Extremal {
        #[arg(long)]
        n: usize,
    },
    /// Blow-up of a cyclic triangle.
    Blowup {
        #[arg(long)]
        n: usize,
    },
    /// Balanced three-part family with an independent set U of size 6m.
    CFamily {
        #[arg(long)]
        m: usize,
    },
    /// Each pair gets an arc with probability p, in a random direction.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Random graph with minimum semidegree at least d.
    MinSemidegree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Cyclic blow-up plus a set U joined to every W vertex; p is the arc probability inside U.
    NearExtremal {
        /// Three part sizes, e.g. `12,12,10`.
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<usize>,
        #[arg(long)]
        u: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
}

#[derive(Subcommand)]
enum Verify {
    Tt4,
    Cyctri,
    Deg {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum Sweep {
    /// Semidegree and perfect-tiling checks on the construction.
    ExtremalBound {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        nodes: Option<u64>,
    },
    /// Exact and local-search leftovers on random dense graphs.
    NearTiling {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 2_000_000)]
        nodes: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Perfect,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Paper,
    Desk,
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        configure_threads(t);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn exec(global: &Global) -> Execution {
    if global.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load(path: &Path) -> Result<OrientedGraph, UsageError> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
    };
    read_graph(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// A closed pipe (e.g. `| head`) is not an error.
fn write_stdout(text: &str) -> Result<(), UsageError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn three(values: &[usize], flag: &str) -> Result<[usize; 3], UsageError> {
    <[usize; 3]>::try_from(values).map_err(|_| UsageError(format!("{flag} takes exactly three values")))
}

fn tiles_json(t: &Tiling) -> serde_json::Value {
    json!(t.tiles.iter().map(|x| x.vertices()).collect::<Vec<_>>())
}

fn validated(g: &OrientedGraph, t: &Tiling, want_perfect: bool) -> (bool, String) {
    match g.check_tiling(t) {
        Ok(c) if c.perfect || !want_perfect => (true, format!("{} tiles, perfect = {}", t.len(), c.perfect)),
        Ok(_) => (false, format!("{} tiles do not cover all vertices", t.len())),
        Err(v) => (false, format!("{v:?}")),
    }
}

fn run(cli: &Cli) -> Result<bool, UsageError> {
    let g = &cli.global;
    let report = match &cli.command {
        Command::Gen { family, perturb: budget } => return generate(g, family, *budget),
        Command::Solve { input, mode, nodes } => {
            let graph = load(input)?;
            let budget = SolveBudget::new(nodes.unwrap_or(u64::MAX), g.budget_ms);
            let mut r = Report::new("solve", g.seed).param("input", input).param("n", graph.vertex_count());
            match mode {
                Mode::Perfect => {
                    let out = find_perfect_tiling(&graph, budget);
                    r = r.param("mode", "perfect");
                    r.set("nodes", out.stats.nodes);
                    match &out.status {
                        SolveStatus::Tiling(t) => {
                            r.set("status", "tiling");
                            r.set("tiling", tiles_json(t));
                            let (ok, detail) = validated(&graph, t, true);
                            r.verdict("tiling validates", ok, detail);
                        }
                        SolveStatus::NoTiling => r.set("status", "no_tiling"),
                        SolveStatus::BudgetExceeded => r.set("status", "budget_exceeded"),
                    }
                }
                Mode::Max => {
                    let out = max_tiling(&graph, budget);
                    r = r.param("mode", "max");
                    r.set("nodes", out.stats.nodes);
                    r.set("optimal", out.optimal);
                    r.set("tiles", out.tiling.len());
                    r.set("leftover", graph.vertex_count() - 3 * out.tiling.len());
                    r.set("tiling", tiles_json(&out.tiling));
                    let (ok, detail) = validated(&graph, &out.tiling, false);
                    r.verdict("tiling validates", ok, detail);
                }
            }
            r
        }
        Command::NearTile { input, moves, pipeline } => {
            let graph = load(input)?;
            let mut r = Report::new("near_tile", g.seed).param("input", input).param("n", graph.vertex_count());
            if *pipeline {
                let opts = NonextremalOptions { time_limit_ms: g.budget_ms, ..NonextremalOptions::default() };
                match nonextremal_tile(&graph, &opts, g.seed) {
                    Ok(run) => {
                        r.records = run.trace.iter().map(|s| json!(s)).collect();
                        r.set("absorber_vertices", run.absorber_vertices);
                        r.set("leftover", run.leftover);
                        r.set("tiling", tiles_json(&run.tiling));
                        let (ok, detail) = validated(&graph, &run.tiling, true);
                        r.verdict("perfect tiling", ok, detail);
                    }
                    Err(e) => {
                        r.records = e.trace.iter().map(|s| json!(s)).collect();
                        r.verdict("perfect tiling", false, e.to_string());
                    }
                }
            } else {
                let out = lex_max_tiling(&graph, *moves);
                let bounds = cover_structure_bounds(&graph, &out.cover);
                r.set("potential", out.cover.potential());
                r.set("leftover", out.leftover);
                r.set("moves", out.moves.len());
                r.set("budget_exceeded", out.budget_exceeded);
                r.set("structure", &bounds);
                r.set("tiling", tiles_json(&out.cover.tiling()));
                r.verdict("cover is valid", out.cover.is_valid_in(&graph), String::new());
            }
            r
        }
        Command::Absorb { input, triple } => {
            let graph = load(input)?;
            let x = three(triple, "--triple")?;
            let search = AbsorbSearch { seed: g.seed, time_limit_ms: g.budget_ms, ..AbsorbSearch::default() };
            let mut r = Report::new("absorb", g.seed).param("input", input).param("triple", x);
            match find_absorbing_set(&graph, x, &search)? {
                Some(a) => {
                    let ok = a.is_valid_in(&graph);
                    r.set("absorbing_set", &a);
                    r.verdict("absorbing set found", ok, format!("U = {:?}", a.u));
                }
                None => r.verdict("absorbing set found", false, "search exhausted".into()),
            }
            r
        }
        Command::Link { input, x, y, p } => {
            let graph = load(input)?;
            let n = graph.vertex_count();
            if *x >= n || *y >= n {
                return Err(UsageError(format!("vertices must be below {n}")));
            }
            let mut r = Report::new("link", g.seed).param("input", input).param("x", x).param("y", y).param("p", p);
            let q = link_quadrants(&graph, *x, *y);
            r.set("quadrants", [q.out_out.len(), q.out_in.len(), q.in_out.len(), q.in_in.len()]);
            r.set("f_arcs", q.f_arcs.len());
            match find_link(&graph, *x, *y, *p, &LinkSearch { seed: g.seed, ..LinkSearch::default() })? {
                Some(w) => {
                    let ok = w.is_valid_in(&graph);
                    r.set("witness", &w);
                    r.verdict("link found", ok, format!("sequence {:?}", w.sequence));
                }
                None => r.verdict("link found", false, "search budget exhausted".into()),
            }
            r
        }
        Command::Extremal { input, preset } => {
            let graph = load(input)?;
            let mut config = match preset {
                Preset::Paper => ExtremalConfig::paper(),
                Preset::Desk => ExtremalConfig::desk(),
            };
            config.exec = exec(g);
            let mut r = Report::new("extremal", g.seed).param("input", input).param("config", &config);
            r.set("beta", config.beta);
            r.set("beta_claim", config.beta_claim());
            match extremal_tile(&graph, &config, g.seed) {
                Ok(run) => {
                    r.records = run.trace.iter().map(|s| json!(s)).collect();
                    r.set("checks", &run.plan.checks);
                    r.set("tiling", tiles_json(&run.tiling));
                    let (ok, detail) = validated(&graph, &run.tiling, true);
                    r.verdict("perfect tiling", ok, detail);
                }
                Err(ExtremalError::StageFailed { stage, detail, trace }) => {
                    r.records = trace.iter().map(|s| json!(s)).collect();
                    r.set("failed_stage", stage);
                    r.verdict("perfect tiling", false, detail);
                }
                Err(e @ ExtremalError::NotExtremal(_)) => {
                    r.set("failed_stage", "not_extremal");
                    r.verdict("perfect tiling", false, e.to_string());
                }
            }
            r
        }
        Command::Verify { what } => match what {
            Verify::Tt4 => verify_prop_tt4(),
            Verify::Cyctri => verify_prop_cyctri(),
            Verify::Deg { input } => {
                let graph = load(input)?;
                verify_prop_deg(&graph, &input.display().to_string())
            }
        },
        Command::Sweep { what } => match what {
            Sweep::ExtremalBound { n, nodes } => {
                sweep_extremal_bound(n, SolveBudget::new(nodes.unwrap_or(u64::MAX), g.budget_ms), exec(g))?
            }
            Sweep::NearTiling { n, samples, nodes } => {
                if n.contains(&0) || *samples == 0 {
                    return Err(UsageError("n and samples must be positive".into()));
                }
                sweep_near_tiling(n, *samples, g.seed, SolveBudget::nodes(*nodes), exec(g))?
            }
        },
        Command::Probe { cases } => {
            let parsed: Vec<(usize, usize)> = if cases.is_empty() {
                DEFAULT_PROBE_CASES.to_vec()
            } else {
                cases
                    .iter()
                    .map(|c| {
                        let (n, d) = c.split_once(':').ok_or_else(|| UsageError(format!("case `{c}` is not n:d")))?;
                        Ok((n.trim().parse()?, d.trim().parse()?))
                    })
                    .collect::<Result<_, UsageError>>()?
            };
            small_exhaustive_probe(&parsed, exec(g))?
        }
    };
    emit(g, &report)
}

fn emit(g: &Global, report: &Report) -> Result<bool, UsageError> {
    if let Some(path) = &g.out {
        fs::write(path, report.to_json() + "\n")?;
    }
    if let Some(path) = &g.csv {
        fs::write(path, report.to_csv()?)?;
    }
    let text = if g.json {
        report.to_json() + "\n"
    } else {
        let mut text = format!("experiment: {}\n", report.experiment);
        for (k, v) in report.aggregate.iter().filter(|(k, _)| k.as_str() != "tiling") {
            text += &format!("  {k} = {v}\n");
        }
        for v in &report.verdicts {
            text += &format!("{}  {}: {}\n", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
        }
        text
    };
    write_stdout(&text)?;
    Ok(report.passed())
}

fn generate(g: &Global, family: &Family, budget: usize) -> Result<bool, UsageError> {
    let (graph, partition): (OrientedGraph, Option<VertexSetPartition>) = match family {
        Family::Extremal { n } => {
            let (graph, p) = extremal_graph(*n)?;
            (graph, Some(p))
        }
        Family::Blowup { n } => {
            if *n < 3 {
                return Err(UsageError("n must be at least 3".into()));
            }
            let (graph, p) = cyclic_blowup(*n);
            (graph, Some(p))
        }
        Family::CFamily { m } => {
            if *m == 0 {
                return Err(UsageError("m must be positive".into()));
            }
            let (graph, spec) = c_family_graph(*m, g.seed);
            (graph, Some(spec.partition))
        }
        Family::Random { n, p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(UsageError("p must lie in [0, 1]".into()));
            }
            (random_oriented_graph(*n, *p, g.seed), None)
        }
        Family::MinSemidegree { n, d } => (random_with_min_semidegree(*n, *d, g.seed, 10_000)?, None),
        Family::NearExtremal { w, u, p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(UsageError("p must lie in [0, 1]".into()));
            }
            let (graph, part) = near_extremal_graph(three(w, "--w")?, *u, *p, g.seed);
            (graph, Some(part))
        }
    };
    let graph = perturb(&graph, budget, g.seed);
    let text = write_graph(&graph);
    match &g.out {
        Some(path) => {
            fs::write(path, &text)?;
            if let Some(p) = partition {
                let mut side = path.clone().into_os_string();
                side.push(".partition.json");
                fs::write(side, serde_json::to_string_pretty(&p)? + "\n")?;
            }
        }
        None => write_stdout(&text)?,
    }
    Ok(true)
}
