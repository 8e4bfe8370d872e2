use std::collections::VecDeque;

use super::Graph;

/// Clustering coefficient and average shortest-path length.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMetrics {
    /// Mean of local clustering `C_v`, with `C_v = 0` for degree <= 1.
    pub clustering_coefficient: f64,
    /// Mean distance over reachable ordered pairs; `None` when no pair of
    /// distinct nodes is connected.
    pub avg_path_length: Option<f64>,
    pub avg_degree: f64,
    pub connected: bool,
}

pub fn metrics(graph: &Graph) -> GraphMetrics {
    let n = graph.node_count();
    let clustering = (0..n).map(|v| local_clustering(graph, v)).sum::<f64>() / n as f64;

    let mut total = 0u64;
    let mut pairs = 0u64;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in graph.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (target, &d) in dist.iter().enumerate() {
            if target != source && d != usize::MAX {
                total += d as u64;
                pairs += 1;
            }
        }
    }
    let all_pairs = (n as u64) * (n as u64 - 1);
    GraphMetrics {
        clustering_coefficient: clustering,
        avg_path_length: (pairs > 0).then(|| total as f64 / pairs as f64),
        avg_degree: 2.0 * graph.edge_count() as f64 / n as f64,
        connected: pairs == all_pairs,
    }
}

fn local_clustering(graph: &Graph, v: usize) -> f64 {
    let k = graph.degree(v);
    if k <= 1 {
        return 0.0;
    }
    let row = graph.neighbor_set(v);
    let links: usize = graph.neighbors(v).iter().map(|&u| graph.neighbor_set(u).intersection_count(row)).sum();
    (links / 2) as f64 / (k * (k - 1) / 2) as f64
}
