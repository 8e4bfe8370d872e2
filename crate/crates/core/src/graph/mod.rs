//! Graph representation, threshold derivation, structural metrics,
//! instance generators and the plain-text graph format.

mod generators;
mod io;
mod metrics;
mod thresholds;
mod utility;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::nodeset::NodeSet;

pub use generators::{
    from_set_cover, gen_class1, gen_class2, gen_random, gen_rewired_clusters, gen_star, NodeRole, RewireMode,
    SetCoverInstance,
};
pub use io::{format_graph, parse_graph, read_graph, write_graph};
pub use metrics::{metrics, GraphMetrics};
pub use thresholds::{derive_thresholds, ThresholdProfile};
pub use utility::{alpha_from_utility, Susceptibility, UtilityProfile};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for graph with {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },
    #[error("no alpha given for node {0} and no default_alpha")]
    MissingAlpha(usize),
    #[error("alpha of node {0} is negative")]
    NegativeAlpha(usize),
    #[error("expected {expected} per-node values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid utility profile: {0}")]
    InvalidUtility(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph with sorted adjacency lists.
///
/// Each node also carries its neighborhood as a [`NodeSet`] so that counting
/// Green neighbors is a popcount.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    rows: Vec<NodeSet>,
}

impl Graph {
    /// Builds a graph; edges may be given in either orientation but must be
    /// simple (no self-loops, no repeats).
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, count: node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !set.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let rows = adjacency
            .iter()
            .map(|list| NodeSet::from_indices(node_count, list.iter().copied()))
            .collect();
        Ok(Graph { node_count, edges, adjacency, rows })
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn neighbor_set(&self, node: usize) -> &NodeSet {
        &self.rows[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count && self.rows[u].contains(v)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
