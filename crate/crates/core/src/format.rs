//! Plain-text graph format.
//!
//! ```text
//! # optional comments
//! n 4
//! 0 1
//! 1 2
//! ```
//!
//! One arc `u v` (meaning `u -> v`) per line, 0-based ids. The reader enforces
//! every [`OrientedGraph`] invariant and rejects duplicate arcs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{GraphError, OrientedGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("line {line}: duplicate arc {u} {v}")]
    DuplicateArc { line: usize, u: usize, v: usize },
    #[error("missing `n <N>` header")]
    MissingHeader,
}

pub fn read_graph(text: &str) -> Result<OrientedGraph, FormatError> {
    let mut graph: Option<OrientedGraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let g = match graph.as_mut() {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(FormatError::Parse { line, message: format!("expected `n <N>`, found `{content}`") });
                }
                let n = parse_id(fields[1], line)?;
                graph = Some(OrientedGraph::new(n));
                continue;
            }
            Some(g) => g,
        };
        if fields.len() != 2 {
            return Err(FormatError::Parse { line, message: format!("expected `<u> <v>`, found `{content}`") });
        }
        let u = parse_id(fields[0], line)?;
        let v = parse_id(fields[1], line)?;
        if u < g.vertex_count() && v < g.vertex_count() && g.has_arc(u, v) {
            return Err(FormatError::DuplicateArc { line, u, v });
        }
        g.add_arc(u, v).map_err(|source| FormatError::Graph { line, source })?;
    }
    graph.ok_or(FormatError::MissingHeader)
}

fn parse_id(token: &str, line: usize) -> Result<usize, FormatError> {
    token
        .parse()
        .map_err(|_| FormatError::Parse { line, message: format!("`{token}` is not a non-negative integer") })
}

pub fn write_graph(g: &OrientedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", g.vertex_count()).unwrap();
    for (u, v) in g.arcs() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_comments_and_arcs() {
        let g = read_graph("# triangle\n\nn 3\n0 1\n1 2\n  # mid comment\n2 0\n").unwrap();
        assert_eq!(g, OrientedGraph::directed_cycle(3));
        assert_eq!(write_graph(&g), "n 3\n0 1\n1 2\n2 0\n");
    }

    #[test]
    fn rejects_invalid_input() {
        assert_eq!(read_graph("# nothing\n"), Err(FormatError::MissingHeader));
        assert!(matches!(read_graph("0 1\n"), Err(FormatError::Parse { line: 1, .. })));
        assert!(matches!(read_graph("n 2\n0 1\n0 1\n"), Err(FormatError::DuplicateArc { line: 3, .. })));
        assert!(matches!(
            read_graph("n 2\n0 1\n1 0\n"),
            Err(FormatError::Graph { line: 3, source: GraphError::OrientationConflict { .. } })
        ));
        assert!(matches!(
            read_graph("n 2\n1 1\n"),
            Err(FormatError::Graph { source: GraphError::LoopRejected(1), .. })
        ));
        assert!(matches!(read_graph("n 2\n0 2\n"), Err(FormatError::Graph { .. })));
        assert!(matches!(read_graph("n 2\n0 x\n"), Err(FormatError::Parse { .. })));
    }
}
