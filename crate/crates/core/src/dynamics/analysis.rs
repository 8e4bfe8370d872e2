use crate::graph::{Graph, ThresholdProfile};
use crate::nodeset::{AdoptionState, NodeSet};
use crate::scalar::Scalar;

use super::{check_len, fd_post_removal_bound, step_raw, DynamicsError, SubsidyMode, SubsidySchedule};

/// Fixed points of the unforced update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumSet {
    pub stable_states: Vec<AdoptionState>,
}

impl EquilibriumSet {
    pub fn contains(&self, state: &AdoptionState) -> bool {
        self.stable_states.contains(state)
    }
}

pub fn is_stable<T>(graph: &Graph, thresholds: &ThresholdProfile<T>, state: &AdoptionState) -> Result<bool, DynamicsError> {
    check_len(graph, state)?;
    Ok(step_raw(graph, thresholds.b(), state, None) == *state)
}

/// Tests all `2^n` states; states are returned in increasing bitmask order.
pub fn enumerate_equilibria<T>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    max_nodes: usize,
) -> Result<EquilibriumSet, DynamicsError> {
    let n = graph.node_count();
    if n > max_nodes || n > 63 {
        return Err(DynamicsError::TooLarge { nodes: n, cap: max_nodes.min(63) });
    }
    let rows: Vec<u64> = (0..n).map(|i| graph.neighbors(i).iter().fold(0u64, |m, &j| m | 1 << j)).collect();
    let b = thresholds.b();
    let mut stable_states = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let fixed = (0..n).all(|i| {
            let green = (mask & rows[i]).count_ones() as usize >= b[i];
            green == (mask >> i & 1 == 1)
        });
        if fixed {
            stable_states.push(NodeSet::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1)));
        }
    }
    Ok(EquilibriumSet { stable_states })
}

/// Co-evolves two states under the schedule's forcing and reports whether
/// `A ⊆ B` holds at every step. Temporary schedules force for `|V|` steps.
pub fn check_monotonicity<T>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    state_a: &AdoptionState,
    state_b: &AdoptionState,
    schedule: &SubsidySchedule,
) -> Result<bool, DynamicsError> {
    check_len(graph, state_a)?;
    check_len(graph, state_b)?;
    check_len(graph, &schedule.subsidized)?;
    if !state_a.is_subset(state_b) {
        return Err(DynamicsError::NotContained);
    }
    let n = graph.node_count();
    let forced_steps = match schedule.mode {
        SubsidyMode::Temporary => n,
        SubsidyMode::FixedDuration(0) => return Err(DynamicsError::ZeroDuration),
        SubsidyMode::FixedDuration(d) => d - 1,
        SubsidyMode::Indefinite => usize::MAX,
    };
    let horizon = forced_steps.min(n) + fd_post_removal_bound(graph) + 2;
    let b = thresholds.b();
    let (mut a, mut bb) = (state_a.clone(), state_b.clone());
    for t in 0..horizon {
        let forced = (t < forced_steps).then_some(&schedule.subsidized);
        a = step_raw(graph, b, &a, forced);
        bb = step_raw(graph, b, &bb, forced);
        if !a.is_subset(&bb) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nodes that can never turn Green without being subsidized: explicit
/// intransigents (`alpha > 1` or `b_i > deg`) and, iteratively, every node
/// whose threshold exceeds its count of neighbors outside the set.
pub fn intransigence_closure<T: Scalar>(graph: &Graph, thresholds: &ThresholdProfile<T>) -> NodeSet {
    let n = graph.node_count();
    let mut closed = NodeSet::from_indices(n, (0..n).filter(|&i| thresholds.is_explicitly_intransigent(graph, i)));
    let b = thresholds.b();
    loop {
        let mut grew = false;
        for (i, &bi) in b.iter().enumerate() {
            if closed.contains(i) {
                continue;
            }
            let open = graph.degree(i) - graph.neighbor_set(i).intersection_count(&closed);
            if bi > open {
                closed.insert(i);
                grew = true;
            }
        }
        if !grew {
            return closed;
        }
    }
}
