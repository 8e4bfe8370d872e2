//! Reference implementations shared by the integration tests. Nothing here
//! calls the crate's dynamics or optimizers; only the graph container is
//! reused.

#![allow(dead_code)]

use std::collections::HashMap;

use greenspread::graph::{Graph, ThresholdProfile};
use greenspread::optimize::Variant;
use greenspread::Rational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type State = Vec<bool>;

/// How long the subsidy is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    /// Until the first step that adds no Green node.
    UntilNoGrowth,
    /// States `0..d` contain the subsidized set.
    Steps(usize),
}

pub fn next_state(graph: &Graph, b: &[usize], x: &State, forced: Option<&[bool]>) -> State {
    (0..x.len())
        .map(|i| {
            let green = graph.neighbors(i).iter().filter(|&&j| x[j]).count();
            green >= b[i] || forced.is_some_and(|f| f[i])
        })
        .collect()
}

/// Full trajectory up to and including the first repeated unforced state,
/// plus the limit cycle.
pub fn simulate(graph: &Graph, b: &[usize], subsidized: &[bool], forcing: Forcing) -> (Vec<State>, Vec<State>) {
    let n = graph.node_count();
    let mut x: State = (0..n).map(|i| subsidized[i] || b[i] == 0).collect();
    let mut states = vec![x.clone()];
    match forcing {
        Forcing::UntilNoGrowth => loop {
            let next = next_state(graph, b, &x, Some(subsidized));
            let grew = next != x;
            x = next;
            states.push(x.clone());
            if !grew {
                break;
            }
        },
        Forcing::Steps(d) => {
            for _ in 1..d {
                x = next_state(graph, b, &x, Some(subsidized));
                states.push(x.clone());
            }
        }
    }
    // Everything after the last forced state is unforced and deterministic.
    let mut seen: HashMap<State, usize> = HashMap::new();
    seen.insert(x.clone(), states.len() - 1);
    loop {
        x = next_state(graph, b, &x, None);
        states.push(x.clone());
        if let Some(&first) = seen.get(&x) {
            let cycle = states[first..states.len() - 1].to_vec();
            return (states, cycle);
        }
        seen.insert(x.clone(), states.len() - 1);
    }
}

pub fn green_count(x: &State) -> usize {
    x.iter().filter(|g| **g).count()
}

/// Average Green count over the limit cycle.
pub fn longterm_count(cycle: &[State]) -> Rational {
    let total: usize = cycle.iter().map(green_count).sum();
    Rational::new(total as i64, cycle.len() as i64)
}

/// Nodes that cannot turn Green without being subsidized themselves.
pub fn closure(graph: &Graph, b: &[usize], alpha_over_one: &[bool]) -> Vec<bool> {
    let n = graph.node_count();
    let mut c: Vec<bool> = (0..n).map(|i| alpha_over_one[i] || b[i] > graph.degree(i)).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            if !c[i] {
                let open = graph.neighbors(i).iter().filter(|&&j| !c[j]).count();
                if b[i] > open {
                    c[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return c;
        }
    }
}

pub fn intransigence_flags(thresholds: &ThresholdProfile<Rational>) -> Vec<bool> {
    thresholds.alpha().iter().map(|a| *a > Rational::from_integer(1)).collect()
}

/// Unpruned enumeration of every subsidy set. MCC: minimum total cost
/// converting every node outside the closure in every cycle state. BMC:
/// maximum long-term Green count with at most `k` nodes. `None` if no set
/// qualifies.
pub fn brute_force(
    variant: Variant,
    graph: &Graph,
    thresholds: &ThresholdProfile<Rational>,
    d: usize,
    k: usize,
    costs: &[Rational],
) -> Option<Rational> {
    let n = graph.node_count();
    assert!(n <= 20, "brute force is exponential");
    let b = thresholds.b();
    let forcing = if variant.is_fd() { Forcing::Steps(d) } else { Forcing::UntilNoGrowth };
    let target: Vec<bool> = closure(graph, b, &intransigence_flags(thresholds)).iter().map(|c| !c).collect();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1u32 << n) {
        let s: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if !variant.is_mcc() && mask.count_ones() as usize > k {
            continue;
        }
        let (_, cycle) = simulate(graph, b, &s, forcing);
        if variant.is_mcc() {
            let ok = cycle.iter().all(|x| (0..n).all(|i| !target[i] || x[i]));
            if ok {
                let cost: Rational = (0..n).filter(|&i| s[i]).map(|i| costs[i]).sum();
                if best.is_none_or(|b| cost < b) {
                    best = Some(cost);
                }
            }
        } else {
            let value = longterm_count(&cycle);
            if best.is_none_or(|b| value > b) {
                best = Some(value);
            }
        }
    }
    best
}

/// Random simple graph with `G(n, p)` edges.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("simple graph")
}

/// Thresholds drawn uniformly from `[1, deg]` (0 for isolated nodes).
pub fn random_counts(rng: &mut ChaCha8Rng, graph: &Graph) -> Vec<usize> {
    (0..graph.node_count())
        .map(|i| {
            let deg = graph.degree(i);
            if deg == 0 {
                0
            } else {
                rng.gen_range(1..=deg)
            }
        })
        .collect()
}

/// Thresholds drawn from `[0, deg + 1]`, covering unconditional and
/// intransigent nodes too.
pub fn random_counts_wide(rng: &mut ChaCha8Rng, graph: &Graph) -> Vec<usize> {
    (0..graph.node_count())
        .map(|i| {
            let deg = graph.degree(i);
            if deg == 0 {
                0
            } else {
                rng.gen_range(0..=deg + 1)
            }
        })
        .collect()
}

pub fn random_set(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(p)).collect()
}

pub fn to_flags(set: &greenspread::NodeSet) -> Vec<bool> {
    (0..set.len()).map(|i| set.contains(i)).collect()
}

pub fn to_set(flags: &[bool]) -> greenspread::NodeSet {
    greenspread::NodeSet::from_indices(flags.len(), (0..flags.len()).filter(|&i| flags[i]))
}
