//! Synchronous threshold dynamics under subsidy schedules.
//!
//! A node is Green in the next state iff it is forced or at least `b_i` of its
//! neighbors are Green now. State 0 holds the subsidized nodes plus every
//! node with `b_i = 0`.

mod analysis;
mod energy;

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, ThresholdProfile};
use crate::nodeset::{AdoptionState, NodeSet};
use crate::scalar::Rational;

pub use analysis::{check_monotonicity, enumerate_equilibria, intransigence_closure, is_stable, EquilibriumSet};
pub use energy::energy;

pub const DEFAULT_EQUILIBRIUM_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("state has {got} entries, graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fixed-duration subsidy needs d >= 1")]
    ZeroDuration,
    #[error("{mode} trajectory did not converge within {cap} steps")]
    BoundViolation { mode: &'static str, cap: usize },
    #[error("energy is only defined for an unforced successor state")]
    NotUnforcedSuccessor,
    #[error("graph with {nodes} nodes exceeds the enumeration cap of {cap}")]
    TooLarge { nodes: usize, cap: usize },
    #[error("first state is not contained in the second")]
    NotContained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsidyMode {
    /// Forced until adoption stops growing, then released.
    Temporary,
    /// States `0..d` are forced.
    FixedDuration(usize),
    /// Forced forever.
    Indefinite,
}

impl SubsidyMode {
    fn label(&self) -> &'static str {
        match self {
            SubsidyMode::Temporary => "temporary",
            SubsidyMode::FixedDuration(_) => "fixed-duration",
            SubsidyMode::Indefinite => "indefinite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsidySchedule {
    pub subsidized: NodeSet,
    pub mode: SubsidyMode,
}

impl SubsidySchedule {
    pub fn temporary(subsidized: NodeSet) -> Self {
        SubsidySchedule { subsidized, mode: SubsidyMode::Temporary }
    }

    pub fn fixed_duration(subsidized: NodeSet, d: usize) -> Result<Self, DynamicsError> {
        if d == 0 {
            return Err(DynamicsError::ZeroDuration);
        }
        Ok(SubsidySchedule { subsidized, mode: SubsidyMode::FixedDuration(d) })
    }

    pub fn indefinite(subsidized: NodeSet) -> Self {
        SubsidySchedule { subsidized, mode: SubsidyMode::Indefinite }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<AdoptionState>,
    /// Index of the first unforced state; `None` under indefinite forcing.
    pub subsidy_end: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    /// First index from which the trajectory is periodic.
    pub transient: usize,
    /// One state (fixed point) or the two alternating states.
    pub cycle: Vec<AdoptionState>,
    /// Mean Green fraction over the cycle, all nodes counted.
    pub longterm_adoption: Rational,
    /// How long the subsidy was applied: the growth-stop step for temporary
    /// subsidies, `d` for fixed-duration ones.
    pub subsidy_duration: Option<usize>,
    /// Index of the state `energy_trace[0]` belongs to.
    pub energy_start: Option<usize>,
    pub energy_trace: Vec<Rational>,
}

/// Limit cycle without the trajectory; what the optimizers consume. The
/// states of a 2-cycle are kept in set order, not in phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limit {
    pub cycle: Vec<AdoptionState>,
}

impl Limit {
    /// Sum of Green counts over the two cycle phases (a fixed point counts
    /// twice), so that averages stay integral.
    pub fn double_count(&self) -> usize {
        match self.cycle.as_slice() {
            [a] => 2 * a.count(),
            [a, b] => a.count() + b.count(),
            _ => unreachable!("limit cycles have length 1 or 2"),
        }
    }

    pub fn adoption(&self, node_count: usize) -> Rational {
        Rational::new(self.double_count() as i64, 2 * node_count as i64)
    }

    /// Every cycle state covers `target`.
    pub fn covers(&self, target: &NodeSet) -> bool {
        self.cycle.iter().all(|s| target.is_subset(s))
    }
}

/// One synchronous update over raw thresholds.
pub(crate) fn step_raw(graph: &Graph, b: &[usize], state: &NodeSet, forced: Option<&NodeSet>) -> NodeSet {
    let n = graph.node_count();
    let mut next = match forced {
        Some(f) => f.clone(),
        None => NodeSet::empty(n),
    };
    for (i, &bi) in b.iter().enumerate() {
        if !next.contains(i) && graph.neighbor_set(i).intersection_count(state) >= bi {
            next.insert(i);
        }
    }
    next
}

fn check_len(graph: &Graph, set: &NodeSet) -> Result<(), DynamicsError> {
    if set.len() != graph.node_count() {
        return Err(DynamicsError::LengthMismatch { expected: graph.node_count(), got: set.len() });
    }
    Ok(())
}

pub fn step<T>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    state: &AdoptionState,
    forced: &NodeSet,
) -> Result<AdoptionState, DynamicsError> {
    check_len(graph, state)?;
    check_len(graph, forced)?;
    Ok(step_raw(graph, thresholds.b(), state, Some(forced)))
}

pub(crate) fn initial_state(b: &[usize], subsidized: &NodeSet) -> NodeSet {
    let mut x0 = subsidized.clone();
    for (i, &bi) in b.iter().enumerate() {
        if bi == 0 {
            x0.insert(i);
        }
    }
    x0
}

/// Post-removal horizon for fixed-duration subsidies: `2|E| + |V|`.
pub fn fd_post_removal_bound(graph: &Graph) -> usize {
    2 * graph.edge_count() + graph.node_count()
}

/// Where `drive` stopped: `x(detect)` repeats with period `period`.
struct Outcome {
    detect: usize,
    period: usize,
    subsidy_end: Option<usize>,
    duration: Option<usize>,
}

/// Drives a schedule to its limit, handing every state to `record`. Also
/// returns the last three states, newest first.
fn drive(
    graph: &Graph,
    b: &[usize],
    schedule: &SubsidySchedule,
    mut record: impl FnMut(&NodeSet),
) -> Result<(Outcome, Vec<NodeSet>), DynamicsError> {
    check_len(graph, &schedule.subsidized)?;
    let n = graph.node_count();
    let s = &schedule.subsidized;
    let mut recent: Vec<NodeSet> = Vec::with_capacity(3);
    let push = |recent: &mut Vec<NodeSet>, x: NodeSet, record: &mut dyn FnMut(&NodeSet)| {
        record(&x);
        recent.insert(0, x);
        recent.truncate(3);
    };
    let x0 = initial_state(b, s);
    push(&mut recent, x0, &mut record);
    let mut t = 0usize;

    match schedule.mode {
        SubsidyMode::Indefinite => loop {
            let next = step_raw(graph, b, &recent[0], Some(s));
            t += 1;
            let done = next == recent[0];
            push(&mut recent, next, &mut record);
            if done {
                let out = Outcome { detect: t - 1, period: 1, subsidy_end: None, duration: None };
                return Ok((out, recent));
            }
            if t >= n {
                return Err(DynamicsError::BoundViolation { mode: schedule.mode.label(), cap: n });
            }
        },
        SubsidyMode::Temporary => {
            let cap = 2 * n;
            let g = loop {
                let next = step_raw(graph, b, &recent[0], Some(s));
                t += 1;
                let stalled = next == recent[0];
                push(&mut recent, next, &mut record);
                if stalled {
                    break t;
                }
                if t >= n {
                    return Err(DynamicsError::BoundViolation { mode: schedule.mode.label(), cap });
                }
            };
            loop {
                let next = step_raw(graph, b, &recent[0], None);
                t += 1;
                let done = next == recent[0];
                push(&mut recent, next, &mut record);
                if done {
                    let out = Outcome { detect: t - 1, period: 1, subsidy_end: Some(g + 1), duration: Some(g) };
                    return Ok((out, recent));
                }
                if t > cap {
                    return Err(DynamicsError::BoundViolation { mode: schedule.mode.label(), cap });
                }
            }
        }
        SubsidyMode::FixedDuration(d) => {
            if d == 0 {
                return Err(DynamicsError::ZeroDuration);
            }
            let cap = d + fd_post_removal_bound(graph);
            while t + 1 < d {
                let next = step_raw(graph, b, &recent[0], Some(s));
                t += 1;
                push(&mut recent, next, &mut record);
            }
            // t = d - 1; every later transition is unforced
            loop {
                let next = step_raw(graph, b, &recent[0], None);
                t += 1;
                push(&mut recent, next, &mut record);
                if t > d && recent[0] == recent[2] {
                    let period = if recent[0] == recent[1] { 1 } else { 2 };
                    let out = Outcome { detect: t - 2, period, subsidy_end: Some(d), duration: Some(d) };
                    return Ok((out, recent));
                }
                if t > cap + 2 {
                    return Err(DynamicsError::BoundViolation { mode: schedule.mode.label(), cap });
                }
            }
        }
    }
}

/// Limit cycle of a schedule without keeping the trajectory.
pub fn limit<T>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    schedule: &SubsidySchedule,
) -> Result<Limit, DynamicsError> {
    limit_raw(graph, thresholds.b(), schedule)
}

pub(crate) fn limit_raw(graph: &Graph, b: &[usize], schedule: &SubsidySchedule) -> Result<Limit, DynamicsError> {
    let (out, recent) = drive(graph, b, schedule, |_| {})?;
    let mut cycle = recent[..out.period].to_vec();
    cycle.sort();
    Ok(Limit { cycle })
}

pub fn run<T>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    schedule: &SubsidySchedule,
) -> Result<(Trajectory, ConvergenceReport), DynamicsError> {
    let b = thresholds.b();
    let mut states = Vec::new();
    let (out, _) = drive(graph, b, schedule, |x| states.push(x.clone()))?;
    let period = out.period;
    let last = states.len() - 1;

    let mut transient = out.detect;
    while transient > 0 && states[transient - 1] == states[transient - 1 + period] {
        transient -= 1;
    }
    let cycle: Vec<NodeSet> = states[transient..transient + period].to_vec();
    let green: usize = cycle.iter().map(NodeSet::count).sum();
    let longterm_adoption = Rational::new(green as i64, (period * graph.node_count()) as i64);

    let energy_start = match schedule.mode {
        SubsidyMode::Temporary => out.duration,
        SubsidyMode::FixedDuration(d) => Some(d - 1),
        SubsidyMode::Indefinite => None,
    };
    let energy_trace = match energy_start {
        Some(start) => (start..last).map(|t| energy::energy_raw(graph, b, &states[t], &states[t + 1])).collect(),
        None => Vec::new(),
    };

    if cfg!(debug_assertions) && schedule.mode == SubsidyMode::Temporary {
        let flat = flat_forcing_fixed_point(graph, b, &schedule.subsidized);
        debug_assert_eq!(flat, cycle[0], "temporary subsidy disagrees with |V|-step forcing");
    }

    let report = ConvergenceReport {
        transient,
        cycle,
        longterm_adoption,
        subsidy_duration: out.duration,
        energy_start,
        energy_trace,
    };
    Ok((Trajectory { states, subsidy_end: out.subsidy_end }, report))
}

/// Forces for a flat `|V|` steps and then relaxes to a fixed point.
fn flat_forcing_fixed_point(graph: &Graph, b: &[usize], s: &NodeSet) -> NodeSet {
    let mut x = initial_state(b, s);
    for _ in 0..graph.node_count() {
        x = step_raw(graph, b, &x, Some(s));
    }
    loop {
        let next = step_raw(graph, b, &x, None);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// `t=<k> <bits>` per state, then the summary line.
pub fn format_trajectory(trajectory: &Trajectory, report: &ConvergenceReport) -> String {
    let mut out = String::new();
    for (t, s) in trajectory.states.iter().enumerate() {
        let _ = writeln!(out, "t={t} {}", s.to_bitstring());
    }
    let a = report.longterm_adoption;
    let _ = writeln!(
        out,
        "cycle={} transient={} adoption={}/{}",
        report.cycle.len(),
        report.transient,
        a.numer(),
        a.denom()
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_class2, gen_star};

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    fn set(n: usize, v: &[usize]) -> NodeSet {
        NodeSet::from_indices(n, v.iter().copied())
    }

    #[test]
    fn three_of_five_green_neighbors_adopts() {
        let g = Graph::new(6, (1..6).map(|v| (0, v))).unwrap();
        let th = ThresholdProfile::uniform(&g, Rational::new(3, 5)).unwrap();
        let next = step(&g, &th, &set(6, &[1, 2, 3]), &NodeSet::empty(6)).unwrap();
        assert!(next.contains(0));
        let next = step(&g, &th, &set(6, &[1, 2]), &NodeSet::empty(6)).unwrap();
        assert!(!next.contains(0));
    }

    #[test]
    fn star_hub_flips_to_leaves() {
        let (g, th) = gen_star(4, half()).unwrap();
        let next = step(&g, &th, &set(5, &[0]), &NodeSet::empty(5)).unwrap();
        assert_eq!(next, set(5, &[1, 2, 3, 4]));
    }

    #[test]
    fn path_temp_converts_everything() {
        let g = Graph::path(4).unwrap();
        let th = ThresholdProfile::uniform(&g, half()).unwrap();
        let (traj, rep) = run(&g, &th, &SubsidySchedule::temporary(set(4, &[0]))).unwrap();
        assert_eq!(traj.states[3], NodeSet::full(4));
        assert_eq!(rep.cycle, vec![NodeSet::full(4)]);
        assert_eq!(rep.transient, 3);
        assert!(rep.transient <= 8);
        assert_eq!(rep.longterm_adoption, Rational::from_integer(1));
    }

    #[test]
    fn star_fd_two_cycle() {
        let (g, th) = gen_star(4, half()).unwrap();
        let sched = SubsidySchedule::fixed_duration(set(5, &[0]), 1).unwrap();
        let (traj, rep) = run(&g, &th, &sched).unwrap();
        assert_eq!(rep.cycle.len(), 2);
        assert_eq!(rep.longterm_adoption, half());
        assert_eq!(rep.transient, 0);
        assert_eq!(traj.subsidy_end, Some(1));
        let lim = limit(&g, &th, &sched).unwrap();
        assert_eq!(lim.cycle, vec![set(5, &[0]), set(5, &[1, 2, 3, 4])]);
        assert_eq!(lim.double_count(), 5);
        let dump = format_trajectory(&traj, &rep);
        assert!(dump.starts_with("t=0 10000\nt=1 01111\n"));
        assert!(dump.ends_with("cycle=2 transient=0 adoption=1/2\n"));
    }

    #[test]
    fn class2_leg_end_keeps_its_leg() {
        let (g, th) = gen_class2::<Rational>(2).unwrap();
        let (_, rep) = run(&g, &th, &SubsidySchedule::temporary(set(7, &[4]))).unwrap();
        assert_eq!(rep.cycle, vec![set(7, &[3, 4])]);
        assert_eq!(rep.longterm_adoption, Rational::new(2, 7));
    }

    #[test]
    fn empty_subsidy_is_all_brown() {
        let (g, th) = gen_class2::<Rational>(2).unwrap();
        for sched in [
            SubsidySchedule::temporary(NodeSet::empty(7)),
            SubsidySchedule::fixed_duration(NodeSet::empty(7), 3).unwrap(),
            SubsidySchedule::indefinite(NodeSet::empty(7)),
        ] {
            let (_, rep) = run(&g, &th, &sched).unwrap();
            assert_eq!(rep.cycle, vec![NodeSet::empty(7)]);
            assert_eq!(rep.transient, 0);
        }
    }

    #[test]
    fn unconditional_nodes_start_green() {
        let g = Graph::path(3).unwrap();
        let th = ThresholdProfile::<Rational>::from_counts(&g, vec![0, 2, 1]).unwrap();
        let (traj, rep) = run(&g, &th, &SubsidySchedule::temporary(NodeSet::empty(3))).unwrap();
        assert_eq!(traj.states[0], set(3, &[0]));
        assert_eq!(rep.cycle, vec![set(3, &[0])]);
    }

    #[test]
    fn limit_matches_run_for_all_modes() {
        let (g, th) = gen_class2::<Rational>(3).unwrap();
        for s in 0..g.node_count() {
            for mode in [SubsidyMode::Temporary, SubsidyMode::FixedDuration(2), SubsidyMode::Indefinite] {
                let sched = SubsidySchedule { subsidized: set(9, &[s]), mode };
                let (_, rep) = run(&g, &th, &sched).unwrap();
                let lim = limit(&g, &th, &sched).unwrap();
                let mut cycle = rep.cycle.clone();
                cycle.sort();
                assert_eq!(lim.cycle, cycle);
                assert_eq!(lim.adoption(9), rep.longterm_adoption);
            }
        }
    }

    #[test]
    fn zero_duration_rejected() {
        assert_eq!(SubsidySchedule::fixed_duration(NodeSet::empty(3), 0), Err(DynamicsError::ZeroDuration));
    }
}
