//! Bitmask re-implementation of the dynamics for graphs of at most 64 nodes.
//! Search code evaluates millions of subsidy sets; this keeps each
//! evaluation allocation-free. Cross-checked against `dynamics::run`.

use crate::graph::Graph;
use crate::nodeset::NodeSet;

#[derive(Debug, Clone)]
pub(crate) struct MaskSim {
    pub n: usize,
    rows: Vec<u64>,
    b: Vec<u32>,
    unconditional: u64,
    d: Option<usize>,
}

/// Limit cycle as two masks (equal for a fixed point).
pub(crate) type MaskCycle = [u64; 2];

pub(crate) fn to_mask(set: &NodeSet) -> u64 {
    set.iter().fold(0, |m, i| m | 1 << i)
}

pub(crate) fn from_mask(n: usize, mask: u64) -> NodeSet {
    NodeSet::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1))
}

impl MaskSim {
    /// `d = None` simulates temporary subsidies.
    pub fn new(graph: &Graph, b: &[usize], d: Option<usize>) -> Self {
        let n = graph.node_count();
        assert!(n <= 64, "mask simulation supports at most 64 nodes");
        let rows = (0..n).map(|i| to_mask(graph.neighbor_set(i))).collect();
        let unconditional = (0..n).filter(|&i| b[i] == 0).fold(0, |m, i| m | 1 << i);
        MaskSim { n, rows, b: b.iter().map(|&x| x as u32).collect(), unconditional, d }
    }

    #[inline]
    pub fn step(&self, x: u64, forced: u64) -> u64 {
        let mut next = forced;
        for i in 0..self.n {
            if (x & self.rows[i]).count_ones() >= self.b[i] {
                next |= 1 << i;
            }
        }
        next
    }

    /// Fixed point of forced growth from `s`; equals the state in which a
    /// temporary subsidy is released.
    pub fn growth_closure(&self, s: u64) -> u64 {
        let mut x = s | self.unconditional;
        loop {
            let next = self.step(x, s);
            if next == x {
                return x;
            }
            x = next;
        }
    }

    pub fn limit(&self, s: u64) -> MaskCycle {
        match self.d {
            None => {
                let mut x = self.growth_closure(s);
                loop {
                    let next = self.step(x, 0);
                    if next == x {
                        return [x, x];
                    }
                    x = next;
                }
            }
            Some(d) => {
                let mut x = s | self.unconditional;
                for _ in 1..d {
                    x = self.step(x, s);
                }
                let mut prev = x;
                let mut cur = self.step(x, 0);
                loop {
                    let next = self.step(cur, 0);
                    if next == prev {
                        return if cur == prev { [cur, cur] } else { [prev.min(cur), prev.max(cur)] };
                    }
                    prev = cur;
                    cur = next;
                }
            }
        }
    }

    pub fn double_count(cycle: &MaskCycle) -> u32 {
        cycle[0].count_ones() + cycle[1].count_ones()
    }
}
