//! Temporal Edge List text format.
//!
//! ```text
//! # optional comments
//! p=4 n=4
//! 0 1 2
//! 2 1 3
//! ```
//!
//! The first data line is the header; every following data line is `t u v`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{id_width, GraphError, NodeId, TemporalGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TelError {
    #[error("missing header line `p=<int> n=<int>`")]
    MissingHeader,
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

impl TelError {
    /// 1-based line number the error refers to, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            TelError::MissingHeader => None,
            TelError::Header { line, .. }
            | TelError::Syntax { line, .. }
            | TelError::Graph { line, .. } => Some(*line),
        }
    }
}

fn parse_header(text: &str, line: usize) -> Result<(usize, usize), TelError> {
    let err = |reason: String| TelError::Header { line, reason };
    let mut p = None;
    let mut n = None;
    for tok in text.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{tok}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| err(format!("`{value}` is not a non-negative integer")))?;
        let slot = match key {
            "p" => &mut p,
            "n" => &mut n,
            other => return Err(err(format!("unknown key `{other}`"))),
        };
        if slot.replace(value).is_some() {
            return Err(err(format!("`{key}` given twice")));
        }
    }
    let p = p.ok_or_else(|| err("missing p".into()))?;
    let n = n.ok_or_else(|| err("missing n".into()))?;
    if p == 0 {
        return Err(err("p must be positive".into()));
    }
    if n == 0 {
        return Err(err("n must be positive".into()));
    }
    Ok((p, n))
}

fn parse_int(tok: &str, line: usize, what: &str) -> Result<i64, TelError> {
    tok.parse::<i64>().map_err(|_| TelError::Syntax {
        line,
        reason: format!("{what} `{tok}` is not an integer"),
    })
}

/// Parses a `.tel` document. Errors carry the 1-based line number.
pub fn parse_tel(text: &str) -> Result<TemporalGraph, TelError> {
    let mut header: Option<(usize, usize)> = None;
    let mut builder = None;
    let mut seen: HashSet<(usize, NodeId, NodeId)> = HashSet::new();
    let mut endpoints: BTreeSet<NodeId> = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let Some((p, n)) = header else {
            let h = parse_header(content, line)?;
            header = Some(h);
            builder = Some(TemporalGraph::builder(h.1, h.0));
            continue;
        };

        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(TelError::Syntax {
                line,
                reason: format!("expected `t u v`, found {} fields", toks.len()),
            });
        }
        let t = parse_int(toks[0], line, "round")?;
        let u = parse_int(toks[1], line, "node")?;
        let v = parse_int(toks[2], line, "node")?;
        let graph_err = |source| TelError::Graph { line, source };
        if t < 0 || t as u64 >= p as u64 {
            return Err(TelError::Syntax {
                line,
                reason: format!("round {t} outside [0, {p})"),
            });
        }
        let width = id_width(n);
        let node = |x: i64| -> Result<NodeId, TelError> {
            if x < 0 {
                return Err(TelError::Syntax {
                    line,
                    reason: format!("node id {x} is negative"),
                });
            }
            if (x as u64) >> width != 0 {
                return Err(graph_err(GraphError::IdTooWide {
                    id: NodeId(x.min(u32::MAX as i64) as u32),
                    n,
                    width,
                }));
            }
            Ok(NodeId(x as u32))
        };
        let (u, v, t) = (node(u)?, node(v)?, t as usize);
        if u == v {
            return Err(graph_err(GraphError::SelfLoop { round: t, node: u }));
        }
        let key = if u < v { (t, u, v) } else { (t, v, u) };
        if !seen.insert(key) {
            return Err(graph_err(GraphError::DuplicateEdge {
                round: t,
                u: key.1,
                v: key.2,
            }));
        }
        endpoints.insert(u);
        endpoints.insert(v);
        if endpoints.len() > n {
            return Err(graph_err(GraphError::TooManyNodes {
                found: endpoints.len(),
                n,
            }));
        }
        builder.as_mut().expect("header seen").push_edge(t, u, v);
    }

    let builder = builder.ok_or(TelError::MissingHeader)?;
    // All per-edge checks already passed; build can only fail on internal invariants.
    builder.build().map_err(|source| TelError::Graph { line: 0, source })
}

/// Serializes a graph to `.tel`, edges sorted by round then endpoints.
pub fn to_tel(g: &TemporalGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p={} n={}", g.period(), g.n()).unwrap();
    for t in 0..g.period() {
        for (u, v) in g.edges_at(t) {
            writeln!(out, "{t} {u} {v}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_path_with_comments_and_crlf() {
        let g = parse_tel("# P3\r\np=1 n=3\r\n0 1 2\r\n  0   2 3 \r\n").unwrap();
        assert_eq!(g, fixtures::path(3));
        assert_eq!(g.nodes(), &[NodeId(1), NodeId(2), NodeId(3)]);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        let err = parse_tel("p=2 n=2\n0 1 1\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(matches!(
            err,
            TelError::Graph {
                source: GraphError::SelfLoop { .. },
                ..
            }
        ));
    }

    #[test]
    fn wrap_fixture_has_ten_temporal_edges() {
        let g = parse_tel(fixtures::WRAP_TEL).unwrap();
        assert_eq!(g.period(), 4);
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.degree(fixtures::W, 2).unwrap(), 3);
    }

    #[test]
    fn error_cases() {
        let line_of = |s: &str| parse_tel(s).unwrap_err().line();
        assert_eq!(parse_tel("# only comments\n"), Err(TelError::MissingHeader));
        assert_eq!(line_of("p=2\n"), Some(1));
        assert_eq!(line_of("p=2 n=x\n"), Some(1));
        assert_eq!(line_of("p=0 n=3\n"), Some(1));
        assert_eq!(line_of("q=2 n=3\n"), Some(1));
        assert_eq!(line_of("p=2 n=3\n0 1 2\n2 1 2\n"), Some(3));
        assert_eq!(line_of("p=2 n=3\n-1 1 2\n"), Some(2));
        assert_eq!(line_of("p=2 n=3\n0 1 2\n#c\n1 2 x\n"), Some(4));
        assert_eq!(line_of("p=2 n=3\n0 1 2 3\n"), Some(2));
        assert_eq!(line_of("p=2 n=3\n0 1 2\n0 2 1\n"), Some(3));
        assert_eq!(line_of("p=2 n=3\n0 1 9\n"), Some(2));
        assert_eq!(line_of("p=2 n=3\n0 0 1\n0 2 3\n"), Some(3));
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let g = parse_tel(fixtures::WRAP_TEL).unwrap();
        assert_eq!(parse_tel(&to_tel(&g)).unwrap(), g);
        let sparse = parse_tel("p=3 n=8\n1 5 7\n").unwrap();
        assert_eq!(sparse.nodes().len(), 8);
        assert_eq!(parse_tel(&to_tel(&sparse)).unwrap(), sparse);
    }
}
