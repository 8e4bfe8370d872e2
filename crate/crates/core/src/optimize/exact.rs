use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::dynamics::intransigence_closure;
use crate::scalar::Scalar;

use super::sim::{from_mask, to_mask, MaskSim};
use super::{certify, OptimizeError, PlanResult, PlanningProblem, SolveOptions};

const CACHE_LIMIT: usize = 1 << 22;

/// Exact optimum with the lexicographically smallest optimal set.
///
/// MCC runs iterative deepening over total cost (candidates by descending
/// degree), then re-searches the optimal cost level in index order to pick
/// the lexicographically smallest set. With uniform costs each connected
/// component is solved on its own. BMC is a depth-first branch and bound in
/// index order.
///
/// Both prune a branch when the branch's set plus every remaining candidate
/// cannot succeed, skip nodes with `b_i = 0` (already Green from the start)
/// and only ever choose twins in index order.
pub fn solve_exact<T: Scalar>(problem: &PlanningProblem<T>, options: &SolveOptions) -> Result<PlanResult<T>, OptimizeError> {
    let n = problem.graph().node_count();
    let cap = options.node_cap.min(64);
    if n > cap {
        return Err(OptimizeError::TooLarge { nodes: n, cap });
    }
    let mut search = Search::new(problem, options.time_budget);
    let set = if problem.variant().is_mcc() {
        let groups: Vec<u64> = if problem.has_uniform_costs() {
            problem.graph().components().iter().map(|c| c.iter().fold(0u64, |m, &i| m | 1 << i)).collect()
        } else {
            vec![search.all]
        };
        let mut chosen = 0u64;
        for group in groups {
            chosen |= search.solve_mcc(group)?;
        }
        chosen
    } else {
        search.solve_bmc(problem.budget().unwrap_or(0))?
    };
    certify(problem, from_mask(n, set), true, search.explored)
}

struct Search<'a, T> {
    problem: &'a PlanningProblem<T>,
    sim: MaskSim,
    temp: bool,
    all: u64,
    /// Nodes worth subsidizing (`b_i > 0`).
    candidates: u64,
    /// `tails[v]`: `v` together with every later member of its twin class.
    tails: Vec<u64>,
    degree: Vec<usize>,
    target: u64,
    /// Nodes outside the intransigence closure. Once all of them are Green
    /// the unforced dynamics keep them Green.
    sustaining: u64,
    goal: u64,
    goal_sustaining: u64,
    goal_is_sustainable: bool,
    feasible_cache: HashMap<u64, bool>,
    value_cache: HashMap<u64, u32>,
    explored: u64,
    started: Instant,
    budget: Option<Duration>,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn new(problem: &'a PlanningProblem<T>, budget: Option<Duration>) -> Self {
        let graph = problem.graph();
        let n = graph.node_count();
        let b = problem.thresholds().b();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let candidates = (0..n).filter(|&i| b[i] > 0).fold(0u64, |m, i| m | 1 << i);
        let target = to_mask(problem.target());
        let sustaining = !to_mask(&intransigence_closure(graph, problem.thresholds())) & all;

        // twins: same neighborhood apart from each other, same threshold,
        // cost and target membership; swapping two twins is an automorphism
        let rows: Vec<u64> = (0..n).map(|i| to_mask(graph.neighbor_set(i))).collect();
        let costs = problem.costs();
        let twins = |u: usize, v: usize| {
            rows[u] & !(1 << v) == rows[v] & !(1 << u)
                && b[u] == b[v]
                && costs[u] == costs[v]
                && (target >> u & 1) == (target >> v & 1)
        };
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; n];
        for v in bits(candidates) {
            match classes.iter().position(|c| c.iter().all(|&u| twins(u, v))) {
                Some(c) => {
                    classes[c].push(v);
                    class_of[v] = c;
                }
                None => {
                    class_of[v] = classes.len();
                    classes.push(vec![v]);
                }
            }
        }
        let tails = (0..n)
            .map(|v| match class_of[v] {
                usize::MAX => 1 << v,
                c => classes[c].iter().filter(|&&u| u >= v).fold(0u64, |m, &u| m | 1 << u),
            })
            .collect();

        Search {
            problem,
            sim: MaskSim::new(graph, b, problem.duration()),
            temp: problem.duration().is_none(),
            all,
            candidates,
            tails,
            degree: (0..n).map(|i| graph.degree(i)).collect(),
            target,
            sustaining,
            goal: 0,
            goal_sustaining: 0,
            goal_is_sustainable: true,
            feasible_cache: HashMap::new(),
            value_cache: HashMap::new(),
            explored: 0,
            started: Instant::now(),
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), OptimizeError> {
        self.explored += 1;
        if self.explored.is_multiple_of(1024) {
            if let Some(budget) = self.budget {
                if self.started.elapsed() > budget {
                    return Err(OptimizeError::Timeout);
                }
            }
        }
        Ok(())
    }

    fn cost(&self, v: usize) -> T {
        self.problem.costs()[v].clone()
    }

    fn min_cost(&self, mask: u64) -> Option<T> {
        bits(mask).map(|v| self.cost(v)).reduce(|a, b| if b < a { b } else { a })
    }

    /// Whether subsidizing `s` leaves every node of the current goal Green
    /// in every state of the limit cycle.
    fn covers(&mut self, s: u64) -> bool {
        if let Some(&hit) = self.feasible_cache.get(&s) {
            return hit;
        }
        let goal = self.goal;
        let ok = if self.temp {
            // the released state is the forced-growth closure and adoption
            // only erodes afterwards
            let grown = self.sim.growth_closure(s);
            if goal & !grown != 0 {
                false
            } else if self.goal_is_sustainable && self.goal_sustaining & !grown == 0 {
                true
            } else {
                goal & !self.sim.limit(s)[0] == 0
            }
        } else {
            let c = self.sim.limit(s);
            goal & !c[0] == 0 && goal & !c[1] == 0
        };
        if self.feasible_cache.len() > CACHE_LIMIT {
            self.feasible_cache.clear();
        }
        self.feasible_cache.insert(s, ok);
        ok
    }

    fn value(&mut self, s: u64) -> u32 {
        if let Some(&v) = self.value_cache.get(&s) {
            return v;
        }
        let v = MaskSim::double_count(&self.sim.limit(s));
        if self.value_cache.len() > CACHE_LIMIT {
            self.value_cache.clear();
        }
        self.value_cache.insert(s, v);
        v
    }

    /// Cheapest lexicographically smallest set converting the target part
    /// inside `group`.
    fn solve_mcc(&mut self, group: u64) -> Result<u64, OptimizeError> {
        self.goal = self.target & group;
        self.goal_sustaining = self.sustaining & group;
        self.goal_is_sustainable = self.goal & !self.sustaining == 0;
        self.feasible_cache.clear();
        let pool = self.candidates & group;
        if self.covers(0) {
            return Ok(0);
        }
        if !self.covers(pool) {
            return Err(OptimizeError::Infeasible);
        }

        let mut by_degree: Vec<usize> = bits(pool).collect();
        by_degree.sort_by_key(|&v| (std::cmp::Reverse(self.degree[v]), v));
        let suffix = suffix_masks(&by_degree);
        let mut bound = self.min_cost(pool).expect("pool is non-empty");
        let best_cost = loop {
            let mut next = None;
            if let Some(found) = self.deepen(&by_degree, &suffix, 0, 0, T::zero(), 0, &bound, &mut next)? {
                break bits(found).fold(T::zero(), |acc, v| acc + self.cost(v));
            }
            bound = next.ok_or(OptimizeError::Infeasible)?;
        };

        let by_index: Vec<usize> = bits(pool).collect();
        let suffix = suffix_masks(&by_index);
        self.lex_first(&by_index, &suffix, 0, 0, T::zero(), 0, &best_cost)?
            .ok_or_else(unreachable_level)
    }

    /// Include/exclude search for any feasible set of cost at most `bound`;
    /// records in `next` the smallest cost that exceeded it.
    #[allow(clippy::too_many_arguments)]
    fn deepen(
        &mut self,
        order: &[usize],
        suffix: &[u64],
        pos: usize,
        chosen: u64,
        cost: T,
        excluded: u64,
        bound: &T,
        next: &mut Option<T>,
    ) -> Result<Option<u64>, OptimizeError> {
        self.tick()?;
        if self.covers(chosen) {
            return Ok(Some(chosen));
        }
        let avail = suffix[pos] & !excluded;
        if avail == 0 || !self.covers(chosen | avail) {
            return Ok(None);
        }
        let need = cost.clone() + self.min_cost(avail).expect("avail is non-empty");
        if need > *bound {
            raise(next, need);
            return Ok(None);
        }
        let v = order[pos];
        if excluded >> v & 1 == 0 {
            let with = cost.clone() + self.cost(v);
            if with <= *bound {
                if let Some(found) = self.deepen(order, suffix, pos + 1, chosen | 1 << v, with, excluded, bound, next)? {
                    return Ok(Some(found));
                }
            } else {
                raise(next, with);
            }
        }
        self.deepen(order, suffix, pos + 1, chosen, cost, excluded | self.tails[v], bound, next)
    }

    /// First feasible set of cost at most `bound` in lexicographic order.
    #[allow(clippy::too_many_arguments)]
    fn lex_first(
        &mut self,
        order: &[usize],
        suffix: &[u64],
        start: usize,
        chosen: u64,
        cost: T,
        excluded: u64,
        bound: &T,
    ) -> Result<Option<u64>, OptimizeError> {
        self.tick()?;
        if self.covers(chosen) {
            return Ok(Some(chosen));
        }
        let mut excluded = excluded;
        for pos in start..order.len() {
            let avail = suffix[pos] & !excluded;
            if avail == 0 || !self.covers(chosen | avail) {
                debug_assert!(!self.covers(chosen), "pruned a feasible branch");
                return Ok(None);
            }
            let v = order[pos];
            if excluded >> v & 1 == 1 {
                continue;
            }
            let with = cost.clone() + self.cost(v);
            if with <= *bound {
                if let Some(found) = self.lex_first(order, suffix, pos + 1, chosen | 1 << v, with, excluded, bound)? {
                    return Ok(Some(found));
                }
            }
            excluded |= self.tails[v];
        }
        Ok(None)
    }

    /// Best set of at most `k` nodes; first one in lexicographic order on
    /// ties.
    fn solve_bmc(&mut self, k: usize) -> Result<u64, OptimizeError> {
        let order: Vec<usize> = bits(self.candidates).collect();
        let suffix = suffix_masks(&order);
        let mut best = (self.value(0), 0u64);
        self.branch(&order, &suffix, 0, 0, 0, k, &mut best)?;
        Ok(best.1)
    }

    #[allow(clippy::too_many_arguments)]
    fn branch(
        &mut self,
        order: &[usize],
        suffix: &[u64],
        start: usize,
        chosen: u64,
        size: usize,
        k: usize,
        best: &mut (u32, u64),
    ) -> Result<(), OptimizeError> {
        self.tick()?;
        let here = self.value(chosen);
        if here > best.0 {
            *best = (here, chosen);
        }
        if size == k {
            return Ok(());
        }
        let mut excluded = 0u64;
        for pos in start..order.len() {
            let avail = suffix[pos] & !excluded;
            if avail == 0 {
                break;
            }
            let upper = self.value(chosen | avail);
            debug_assert!(here <= upper, "superset bound violated");
            if upper <= best.0 {
                break;
            }
            let v = order[pos];
            if excluded >> v & 1 == 1 || !self.twin_allowed(v, chosen, order) {
                continue;
            }
            self.branch(order, suffix, pos + 1, chosen | 1 << v, size + 1, k, best)?;
            excluded |= self.tails[v];
        }
        Ok(())
    }

    /// `v` may join only after the previous member of its twin class.
    fn twin_allowed(&self, v: usize, chosen: u64, order: &[usize]) -> bool {
        order.iter().take_while(|&&u| u < v).all(|&u| self.tails[u] >> v & 1 == 0 || chosen >> u & 1 == 1)
    }
}

fn raise<T: Scalar>(next: &mut Option<T>, value: T) {
    if next.as_ref().is_none_or(|n| value < *n) {
        *next = Some(value);
    }
}

fn unreachable_level() -> OptimizeError {
    OptimizeError::InvalidProblem("optimal cost level could not be re-derived".into())
}

fn suffix_masks(order: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; order.len() + 1];
    for pos in (0..order.len()).rev() {
        out[pos] = out[pos + 1] | 1 << order[pos];
    }
    out
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}
