use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::scalar::Scalar;

use super::{derive_thresholds, Graph, GraphError, ThresholdProfile};

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, GraphError> {
    Err(GraphError::Parse { line, message: message.into() })
}

fn parse_index(tok: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    match tok.map(str::parse::<usize>) {
        Some(Ok(v)) => Ok(v),
        Some(Err(_)) => parse_err(line, format!("invalid {what}")),
        None => parse_err(line, format!("missing {what}")),
    }
}

fn parse_alpha<T: Scalar>(tok: Option<&str>, line: usize) -> Result<T, GraphError> {
    let Some(tok) = tok else {
        return parse_err(line, "missing alpha value");
    };
    match T::parse_literal(tok) {
        Some(a) if a.is_negative() => parse_err(line, "negative alpha"),
        Some(a) => Ok(a),
        None => parse_err(line, format!("invalid alpha `{tok}`")),
    }
}

/// Parses the line-oriented graph format:
///
/// ```text
/// nodes 3
/// edge 0 1
/// default_alpha 1/2
/// alpha 2 0.75
/// ```
pub fn parse_graph<T: Scalar>(text: &str) -> Result<(Graph, ThresholdProfile<T>), GraphError> {
    let mut nodes: Option<usize> = None;
    let mut edges = BTreeSet::new();
    let mut default_alpha: Option<T> = None;
    let mut alpha: Vec<Option<T>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(directive) = toks.next() else { continue };
        let need_nodes = |nodes: Option<usize>| match nodes {
            Some(n) => Ok(n),
            None => parse_err(line, format!("`{directive}` before `nodes`")),
        };
        match directive {
            "nodes" => {
                if nodes.is_some() {
                    return parse_err(line, "repeated `nodes`");
                }
                let n = parse_index(toks.next(), line, "node count")?;
                if n == 0 {
                    return parse_err(line, "graph must have at least one node");
                }
                nodes = Some(n);
                alpha = vec![None; n];
            }
            "edge" => {
                let n = need_nodes(nodes)?;
                let u = parse_index(toks.next(), line, "edge endpoint")?;
                let v = parse_index(toks.next(), line, "edge endpoint")?;
                if u >= n || v >= n {
                    return parse_err(line, format!("node {} out of range", u.max(v)));
                }
                if u == v {
                    return parse_err(line, "self-loop");
                }
                if !edges.insert((u.min(v), u.max(v))) {
                    return parse_err(line, format!("duplicate edge ({u}, {v})"));
                }
            }
            "default_alpha" => {
                if default_alpha.is_some() {
                    return parse_err(line, "repeated `default_alpha`");
                }
                default_alpha = Some(parse_alpha(toks.next(), line)?);
            }
            "alpha" => {
                let n = need_nodes(nodes)?;
                let i = parse_index(toks.next(), line, "node index")?;
                if i >= n {
                    return parse_err(line, format!("node {i} out of range"));
                }
                if alpha[i].is_some() {
                    return parse_err(line, format!("repeated alpha for node {i}"));
                }
                alpha[i] = Some(parse_alpha(toks.next(), line)?);
            }
            other => return parse_err(line, format!("unknown directive `{other}`")),
        }
        if toks.next().is_some() {
            return parse_err(line, "trailing tokens");
        }
    }

    let Some(n) = nodes else {
        return parse_err(text.lines().count().max(1), "missing `nodes`");
    };
    let alpha = alpha
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.or_else(|| default_alpha.clone()).ok_or(GraphError::MissingAlpha(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let graph = Graph::new(n, edges)?;
    let profile = derive_thresholds(&graph, alpha)?;
    Ok((graph, profile))
}

/// Inverse of [`parse_graph`]. A uniform alpha is written once as
/// `default_alpha`.
pub fn format_graph<T: Scalar>(graph: &Graph, profile: &ThresholdProfile<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nodes {}", graph.node_count());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "edge {u} {v}");
    }
    let alpha = profile.alpha();
    if alpha.iter().all(|a| *a == alpha[0]) {
        let _ = writeln!(out, "default_alpha {}", alpha[0]);
    } else {
        for (i, a) in alpha.iter().enumerate() {
            let _ = writeln!(out, "alpha {i} {a}");
        }
    }
    out
}

pub fn read_graph<T: Scalar>(path: impl AsRef<Path>) -> Result<(Graph, ThresholdProfile<T>), GraphError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn write_graph<T: Scalar>(
    graph: &Graph,
    profile: &ThresholdProfile<T>,
    path: impl AsRef<Path>,
) -> Result<(), GraphError> {
    std::fs::write(path, format_graph(graph, profile))?;
    Ok(())
}
