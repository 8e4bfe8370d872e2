//! Threshold adoption dynamics on graphs with temporary subsidies.
//!
//! Nodes are Brown (0) or Green (1). Node `i` turns Green when at least
//! `b_i = ceil(deg(i) * alpha_i)` of its neighbors are Green, or while it is
//! subsidized. The crate simulates these dynamics, certifies convergence,
//! finds optimal subsidy sets and writes equivalent integer programs.
//!
//! Numeric code is generic over [`scalar::Scalar`]; the aliases below fix the
//! exact `Rational` instantiation used by the CLI, and `*F64` aliases give
//! the float one.

pub mod dynamics;
pub mod graph;
pub mod ip_gen;
pub mod nodeset;
pub mod optimize;
pub mod scalar;

pub use dynamics::{
    limit, run, ConvergenceReport, DynamicsError, Limit, SubsidyMode, SubsidySchedule, Trajectory,
};
pub use graph::{Graph, GraphError};
pub use nodeset::{AdoptionState, NodeSet};
pub use optimize::{OptimizeError, PlanResult, SolveOptions, Variant};
pub use scalar::{BigRational, Rational, Scalar};

pub type Thresholds = graph::ThresholdProfile<Rational>;
pub type ThresholdsF64 = graph::ThresholdProfile<f64>;
pub type Problem = optimize::PlanningProblem<Rational>;
pub type ProblemF64 = optimize::PlanningProblem<f64>;
pub type Plan = optimize::PlanResult<Rational>;
pub type Model = ip_gen::IpModel<Rational>;
pub type ModelF64 = ip_gen::IpModel<f64>;
pub type Solution = ip_gen::IpSolution<Rational>;
pub type Utility = graph::UtilityProfile<Rational>;
