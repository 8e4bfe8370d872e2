//! Subsidy planning: exact search over subsidy sets, a greedy heuristic and
//! random baselines. The simulator is the evaluation oracle; superset
//! monotonicity of the long-term adoption set drives all pruning.

mod baselines;
mod exact;
pub(crate) mod sim;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::dynamics::{intransigence_closure, ConvergenceReport, DynamicsError, SubsidySchedule};
use crate::graph::{Graph, ThresholdProfile};
use crate::nodeset::NodeSet;
use crate::scalar::Scalar;

pub use baselines::{exhaustive_baseline, greedy, random_baseline, BaselineSummary};
pub use exact::solve_exact;

pub const DEFAULT_NODE_CAP: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OptimizeError {
    #[error("no subsidy set converts the whole target")]
    Infeasible,
    #[error("graph with {nodes} nodes exceeds the search cap of {cap}")]
    TooLarge { nodes: usize, cap: usize },
    #[error("time budget exhausted")]
    Timeout,
    #[error("{0} is not available for this variant")]
    VariantMismatch(&'static str),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    TempMcc,
    TempBmc,
    FdMcc,
    FdBmc,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::TempMcc, Variant::TempBmc, Variant::FdMcc, Variant::FdBmc];

    pub fn is_mcc(self) -> bool {
        matches!(self, Variant::TempMcc | Variant::FdMcc)
    }

    pub fn is_fd(self) -> bool {
        matches!(self, Variant::FdMcc | Variant::FdBmc)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::TempMcc => "tempMCC",
            Variant::TempBmc => "tempBMC",
            Variant::FdMcc => "fdMCC",
            Variant::FdBmc => "fdBMC",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    /// Case-insensitive; `temp-mcc`, `temp_mcc` and `tempMCC` all work.
    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "tempmcc" => Ok(Variant::TempMcc),
            "tempbmc" => Ok(Variant::TempBmc),
            "fdmcc" => Ok(Variant::FdMcc),
            "fdbmc" => Ok(Variant::FdBmc),
            _ => Err(format!("unknown variant `{s}` (expected tempMCC, tempBMC, fdMCC or fdBMC)")),
        }
    }
}

/// One of the four planning problems on a fixed instance.
#[derive(Debug, Clone)]
pub struct PlanningProblem<T> {
    variant: Variant,
    graph: Graph,
    thresholds: ThresholdProfile<T>,
    duration: usize,
    budget: usize,
    costs: Vec<T>,
    target: NodeSet,
}

impl<T: Scalar> PlanningProblem<T> {
    fn build(
        variant: Variant,
        graph: Graph,
        thresholds: ThresholdProfile<T>,
        duration: usize,
        budget: usize,
    ) -> Result<Self, OptimizeError> {
        if thresholds.len() != graph.node_count() {
            return Err(OptimizeError::InvalidProblem("thresholds do not match the graph".into()));
        }
        if variant.is_fd() && duration == 0 {
            return Err(DynamicsError::ZeroDuration.into());
        }
        let target = intransigence_closure(&graph, &thresholds).complement();
        let costs = vec![T::one(); graph.node_count()];
        Ok(PlanningProblem { variant, graph, thresholds, duration, budget, costs, target })
    }

    pub fn temp_mcc(graph: Graph, thresholds: ThresholdProfile<T>) -> Result<Self, OptimizeError> {
        Self::build(Variant::TempMcc, graph, thresholds, 0, 0)
    }

    pub fn temp_bmc(graph: Graph, thresholds: ThresholdProfile<T>, k: usize) -> Result<Self, OptimizeError> {
        Self::build(Variant::TempBmc, graph, thresholds, 0, k)
    }

    pub fn fd_mcc(graph: Graph, thresholds: ThresholdProfile<T>, d: usize) -> Result<Self, OptimizeError> {
        Self::build(Variant::FdMcc, graph, thresholds, d, 0)
    }

    pub fn fd_bmc(graph: Graph, thresholds: ThresholdProfile<T>, d: usize, k: usize) -> Result<Self, OptimizeError> {
        Self::build(Variant::FdBmc, graph, thresholds, d, k)
    }

    /// `d` is ignored by temp variants and `k` by MCC variants.
    pub fn new(
        variant: Variant,
        graph: Graph,
        thresholds: ThresholdProfile<T>,
        d: usize,
        k: usize,
    ) -> Result<Self, OptimizeError> {
        Self::build(variant, graph, thresholds, if variant.is_fd() { d } else { 0 }, if variant.is_mcc() { 0 } else { k })
    }

    /// Per-node subsidy costs; all must be positive.
    pub fn with_costs(mut self, costs: Vec<T>) -> Result<Self, OptimizeError> {
        if costs.len() != self.graph.node_count() {
            return Err(OptimizeError::InvalidProblem("one cost per node required".into()));
        }
        if costs.iter().any(|c| !c.is_positive()) {
            return Err(OptimizeError::InvalidProblem("costs must be positive".into()));
        }
        self.costs = costs;
        Ok(self)
    }

    /// Replaces the default completeness target (every node outside the
    /// intransigence closure).
    pub fn with_target(mut self, target: NodeSet) -> Result<Self, OptimizeError> {
        if target.len() != self.graph.node_count() {
            return Err(OptimizeError::InvalidProblem("target does not match the graph".into()));
        }
        self.target = target;
        Ok(self)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn thresholds(&self) -> &ThresholdProfile<T> {
        &self.thresholds
    }

    /// Subsidy duration `d` (fd variants only).
    pub fn duration(&self) -> Option<usize> {
        self.variant.is_fd().then_some(self.duration)
    }

    /// Budget `k` (BMC variants only).
    pub fn budget(&self) -> Option<usize> {
        (!self.variant.is_mcc()).then_some(self.budget)
    }

    pub fn costs(&self) -> &[T] {
        &self.costs
    }

    pub fn target(&self) -> &NodeSet {
        &self.target
    }

    pub fn has_uniform_costs(&self) -> bool {
        self.costs.iter().all(|c| *c == self.costs[0])
    }

    pub fn schedule(&self, subsidized: NodeSet) -> SubsidySchedule {
        if self.variant.is_fd() {
            SubsidySchedule { subsidized, mode: crate::dynamics::SubsidyMode::FixedDuration(self.duration) }
        } else {
            SubsidySchedule::temporary(subsidized)
        }
    }

    pub fn cost_of(&self, set: &NodeSet) -> T {
        set.iter().fold(T::zero(), |acc, i| acc + self.costs[i].clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult<T> {
    pub subsidy_set: NodeSet,
    /// Total cost for MCC, long-term adoption fraction for BMC.
    pub objective: T,
    pub certificate: ConvergenceReport,
    pub optimal: bool,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub node_cap: usize,
    pub time_budget: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { node_cap: DEFAULT_NODE_CAP, time_budget: None }
    }
}

pub(crate) fn certify<T: Scalar>(
    problem: &PlanningProblem<T>,
    set: NodeSet,
    optimal: bool,
    nodes_explored: u64,
) -> Result<PlanResult<T>, OptimizeError> {
    let (_, report) = crate::dynamics::run(&problem.graph, &problem.thresholds, &problem.schedule(set.clone()))?;
    let objective = if problem.variant.is_mcc() {
        problem.cost_of(&set)
    } else {
        T::from_rational(&report.longterm_adoption)
    };
    Ok(PlanResult { subsidy_set: set, objective, certificate: report, optimal, nodes_explored })
}
