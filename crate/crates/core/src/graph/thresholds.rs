use crate::scalar::{intransigent_alpha, Scalar};

use super::{Graph, GraphError};

/// Per-node susceptibility fractions together with the cardinality
/// thresholds `b_i = ceil(deg(i) * alpha_i)` they induce on a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdProfile<T> {
    alpha: Vec<T>,
    b: Vec<usize>,
}

/// Derives cardinality thresholds from fractions. `alpha` is stored verbatim.
pub fn derive_thresholds<T: Scalar>(graph: &Graph, alpha: Vec<T>) -> Result<ThresholdProfile<T>, GraphError> {
    if alpha.len() != graph.node_count() {
        return Err(GraphError::LengthMismatch { expected: graph.node_count(), got: alpha.len() });
    }
    let b = alpha
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let scaled = a.clone() * T::from_count(graph.degree(i));
            scaled.ceil_count().map(|c| c as usize).ok_or(GraphError::NegativeAlpha(i))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ThresholdProfile { alpha, b })
}

impl<T: Scalar> ThresholdProfile<T> {
    pub fn uniform(graph: &Graph, alpha: T) -> Result<Self, GraphError> {
        derive_thresholds(graph, vec![alpha; graph.node_count()])
    }

    /// Profile with the given cardinalities; alpha is set to `b_i / deg(i)`
    /// (or the intransigent marker when `b_i = deg(i) + 1`), so re-deriving
    /// reproduces `b` exactly.
    pub fn from_counts(graph: &Graph, b: Vec<usize>) -> Result<Self, GraphError> {
        if b.len() != graph.node_count() {
            return Err(GraphError::LengthMismatch { expected: graph.node_count(), got: b.len() });
        }
        let mut alpha = Vec::with_capacity(b.len());
        for (i, &bi) in b.iter().enumerate() {
            let deg = graph.degree(i);
            let a = if bi == 0 {
                T::zero()
            } else if bi <= deg {
                T::from_ratio(bi as i64, deg as i64)
            } else if bi == deg + 1 && deg > 0 {
                intransigent_alpha()
            } else {
                return Err(GraphError::InvalidParameter(format!(
                    "threshold {bi} on node {i} of degree {deg} cannot be expressed as ceil(deg * alpha)"
                )));
            };
            alpha.push(a);
        }
        derive_thresholds(graph, alpha)
    }

    /// `alpha_i > 1`, or a threshold no neighborhood can meet.
    pub fn is_explicitly_intransigent(&self, graph: &Graph, node: usize) -> bool {
        self.alpha[node] > T::one() || self.b[node] > graph.degree(node)
    }

}

impl<T> ThresholdProfile<T> {
    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    /// Cardinality thresholds.
    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// Nodes with `b_i = 0`; they adopt whatever their neighbors do.
    pub fn unconditional_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.b.iter().enumerate().filter(|(_, b)| **b == 0).map(|(i, _)| i)
    }
}
