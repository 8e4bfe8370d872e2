use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{intransigent_alpha, Scalar};

use super::{derive_thresholds, Graph, GraphError, ThresholdProfile};

/// How rewiring handles a proposal that would create a self-loop or a
/// duplicate edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewireMode {
    /// Draw a new proposal; the edge count is preserved.
    #[default]
    Resample,
    /// Drop the edge instead, so the graph may lose a few edges.
    DropDuplicates,
}

/// Cardinality instance: elements `0..element_count`, a family of subsets and
/// an optional coverage budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    pub element_count: usize,
    pub subsets: Vec<Vec<usize>>,
    pub budget: Option<usize>,
}

/// What a node of a set-cover reduction stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Subset(usize),
    Element(usize),
    Dummy(usize),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, GraphError> {
    Err(GraphError::InvalidParameter(msg.into()))
}

/// Triangle `{0, 1, 2}` with two legs of `n - 1` nodes each hanging off node 0.
/// Uniform alpha of one half.
pub fn gen_class1<T: Scalar>(n: usize) -> Result<(Graph, ThresholdProfile<T>), GraphError> {
    if n < 2 {
        return invalid(format!("class 1 needs n >= 2, got {n}"));
    }
    let mut edges = vec![(0, 1), (0, 2), (1, 2)];
    let mut next = 3;
    for _ in 0..2 {
        let mut prev = 0;
        for _ in 0..n - 1 {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    let graph = Graph::new(next, edges)?;
    let profile = ThresholdProfile::uniform(&graph, T::half())?;
    Ok((graph, profile))
}

/// Triangle `{0, 1, 2}` plus `n` legs `0 - (3 + 2j) - (4 + 2j)`. Node 0 gets
/// alpha `2 / (n + 2)` so that it needs exactly two Green neighbors.
pub fn gen_class2<T: Scalar>(n: usize) -> Result<(Graph, ThresholdProfile<T>), GraphError> {
    if n < 1 {
        return invalid("class 2 needs n >= 1");
    }
    let mut edges = vec![(0, 1), (0, 2), (1, 2)];
    for j in 0..n {
        edges.push((0, 3 + 2 * j));
        edges.push((3 + 2 * j, 4 + 2 * j));
    }
    let graph = Graph::new(2 * n + 3, edges)?;
    let mut alpha = vec![T::half(); graph.node_count()];
    alpha[0] = T::from_ratio(2, n as i64 + 2);
    let profile = derive_thresholds(&graph, alpha)?;
    Ok((graph, profile))
}

/// Hub 0 joined to `leaves` leaves.
pub fn gen_star<T: Scalar>(leaves: usize, alpha: T) -> Result<(Graph, ThresholdProfile<T>), GraphError> {
    if leaves < 2 {
        return invalid(format!("star needs at least 2 leaves, got {leaves}"));
    }
    let graph = Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v)))?;
    let profile = ThresholdProfile::uniform(&graph, alpha)?;
    Ok((graph, profile))
}

/// Erdos-Renyi `G(n, p)`.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("edge probability {p} outside [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Disjoint cliques of `cluster_size` nodes (cluster `c` holds nodes
/// `c * cluster_size ..`). Each original edge, in sorted order, is rewired
/// with probability `p`: it is removed and one of its endpoints, chosen
/// uniformly, is joined to a node chosen uniformly from the whole graph.
pub fn gen_rewired_clusters(
    clusters: usize,
    cluster_size: usize,
    p: f64,
    seed: u64,
    mode: RewireMode,
) -> Result<Graph, GraphError> {
    if clusters < 1 || cluster_size < 2 {
        return invalid("need at least one cluster of at least two nodes");
    }
    if clusters * cluster_size < 3 {
        return invalid("rewired clusters need at least 3 nodes");
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("rewiring probability {p} outside [0, 1]"));
    }
    let n = clusters * cluster_size;
    let original: Vec<(usize, usize)> = (0..clusters)
        .flat_map(|c| {
            let base = c * cluster_size;
            (0..cluster_size).flat_map(move |i| (i + 1..cluster_size).map(move |j| (base + i, base + j)))
        })
        .collect();
    let mut edges: BTreeSet<(usize, usize)> = original.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &(u, v) in &original {
        if !rng.gen_bool(p) {
            continue;
        }
        edges.remove(&(u, v));
        loop {
            let end = if rng.gen_bool(0.5) { u } else { v };
            let other = rng.gen_range(0..n);
            let key = (end.min(other), end.max(other));
            if end != other && !edges.contains(&key) {
                edges.insert(key);
                break;
            }
            if mode == RewireMode::DropDuplicates {
                break;
            }
        }
    }
    Graph::new(n, edges)
}

/// Reduction from set cover. Nodes are laid out as subsets, then elements,
/// then one dummy per element. Subset nodes are intransigent; each element
/// is adjacent to the subsets containing it and to its pendant dummy.
pub fn from_set_cover<T: Scalar>(
    inst: &SetCoverInstance,
) -> Result<(Graph, ThresholdProfile<T>, Vec<NodeRole>), GraphError> {
    let f = inst.subsets.len();
    let n = inst.element_count;
    if f == 0 {
        return invalid("set cover instance has no subsets");
    }
    let mut covered = vec![false; n];
    for subset in &inst.subsets {
        for &e in subset {
            if e >= n {
                return invalid(format!("element {e} out of range for {n} elements"));
            }
            covered[e] = true;
        }
    }
    if let Some(e) = covered.iter().position(|c| !c) {
        return invalid(format!("element {e} is not in any subset"));
    }
    let mut edges = Vec::new();
    for (s, subset) in inst.subsets.iter().enumerate() {
        let members: BTreeSet<usize> = subset.iter().copied().collect();
        edges.extend(members.into_iter().map(|e| (s, f + e)));
    }
    edges.extend((0..n).map(|e| (f + e, f + n + e)));
    let graph = Graph::new(f + 2 * n, edges)?;

    let mut alpha = vec![intransigent_alpha::<T>(); f];
    alpha.extend(std::iter::repeat_with(|| T::from_ratio(1, f as i64 + 1)).take(n));
    alpha.extend(std::iter::repeat_with(T::one).take(n));
    let profile = derive_thresholds(&graph, alpha)?;

    let roles = (0..f)
        .map(NodeRole::Subset)
        .chain((0..n).map(NodeRole::Element))
        .chain((0..n).map(NodeRole::Dummy))
        .collect();
    Ok((graph, profile, roles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::metrics;
    use crate::scalar::Rational;

    #[test]
    fn class1_counts() {
        let (g, th) = gen_class1::<Rational>(2).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (5, 5));
        assert_eq!(th.b(), &[2, 1, 1, 1, 1]);
        for n in 2..12 {
            let (g, _) = gen_class1::<Rational>(n).unwrap();
            assert_eq!(g.node_count(), 2 * n + 1);
            let degrees: Vec<usize> = (0..g.node_count()).map(|i| g.degree(i)).collect();
            assert_eq!(degrees.iter().filter(|d| **d == 4).count(), 1);
            assert_eq!(&degrees[..3], &[4, 2, 2]);
        }
        assert!(gen_class1::<Rational>(1).is_err());
    }

    #[test]
    fn class2_hub_needs_two() {
        for n in 1..8 {
            let (g, th) = gen_class2::<Rational>(n).unwrap();
            assert_eq!(g.node_count(), 2 * n + 3);
            assert_eq!(g.degree(0), n + 2);
            assert_eq!(th.b()[0], 2);
        }
    }

    #[test]
    fn star_thresholds() {
        let (_, th) = gen_star(4, Rational::new(1, 2)).unwrap();
        assert_eq!(th.b(), &[2, 1, 1, 1, 1]);
        let (_, th) = gen_star(2, Rational::new(1, 2)).unwrap();
        assert_eq!(th.b()[0], 1);
        let (_, th) = gen_star(6, Rational::new(1, 3)).unwrap();
        assert_eq!(th.b()[0], 2);
    }

    #[test]
    fn unrewired_clusters_are_cliques() {
        let g = gen_rewired_clusters(5, 6, 0.0, 3, RewireMode::Resample).unwrap();
        assert_eq!(g.edge_count(), 75);
        let m = metrics(&g);
        assert_eq!(m.clustering_coefficient, 1.0);
        assert!(!m.connected);
    }

    #[test]
    fn rewiring_is_deterministic_and_keeps_edges() {
        for p in [0.1, 0.5, 1.0] {
            let a = gen_rewired_clusters(5, 6, p, 7, RewireMode::Resample).unwrap();
            let b = gen_rewired_clusters(5, 6, p, 7, RewireMode::Resample).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.edge_count(), 75);
        }
        let full = gen_rewired_clusters(5, 6, 1.0, 1, RewireMode::Resample).unwrap();
        assert!(metrics(&full).clustering_coefficient < 0.5);
        let dropped = gen_rewired_clusters(5, 6, 1.0, 1, RewireMode::DropDuplicates).unwrap();
        assert!(dropped.edge_count() <= 75);
    }

    #[test]
    fn set_cover_layout() {
        let inst = SetCoverInstance { element_count: 2, subsets: vec![vec![0], vec![0, 1]], budget: None };
        let (g, th, roles) = from_set_cover::<Rational>(&inst).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.degree(2), 3);
        assert_eq!(roles[2], NodeRole::Element(0));
        assert_eq!(roles[5], NodeRole::Dummy(1));
        assert_eq!(&th.b()[2..4], &[1, 1]);
        for s in 0..2 {
            assert!(th.b()[s] > g.degree(s));
        }
        assert_eq!(&th.b()[4..], &[1, 1]);
    }

    #[test]
    fn set_cover_rejects_bad_instances() {
        let empty = SetCoverInstance { element_count: 1, subsets: vec![], budget: None };
        assert!(from_set_cover::<Rational>(&empty).is_err());
        let uncovered = SetCoverInstance { element_count: 2, subsets: vec![vec![0]], budget: None };
        assert!(from_set_cover::<Rational>(&uncovered).is_err());
    }
}
