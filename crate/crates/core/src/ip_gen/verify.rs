use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::time::Duration;

use num_traits::{Signed, ToPrimitive};

use crate::dynamics::{limit, step, SubsidySchedule};
use crate::graph::{Graph, ThresholdProfile};
use crate::nodeset::NodeSet;
use crate::optimize::{solve_exact, OptimizeError, PlanningProblem, SolveOptions, Variant};
use crate::scalar::{parse_rational, Rational, Scalar};

use super::{parse_x_name, parse_y_name, IpError, IpModel, ObjectiveSense, VarKind};

const INTEGRALITY_TOL: f64 = 1e-6;
/// Largest instance for which the report includes the true optimum.
const EXACT_NODE_LIMIT: usize = 20;
const EXACT_TIME_BUDGET: Duration = Duration::from_secs(5);

/// Values reported by an external solver, keyed by variable name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IpSolution<T> {
    pub values: HashMap<String, T>,
    /// Objective value claimed by the solver, if the file has one.
    pub objective: Option<T>,
}

/// Reads `name value` lines; `#` starts a comment and a line
/// `objective <v>` records the claimed objective.
pub fn parse_solution<T: Scalar>(text: &str) -> Result<IpSolution<T>, IpError> {
    let mut solution = IpSolution { values: HashMap::new(), objective: None };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(IpError::Parse { line, message: "expected `name value`".into() });
        };
        let value = parse_rational(value)
            .map(|r| T::from_rational(&r))
            .or_else(|| T::parse_literal(value))
            .ok_or_else(|| IpError::Parse { line, message: format!("invalid value `{value}`") })?;
        if name == "objective" {
            solution.objective = Some(value);
        } else if solution.values.insert(name.to_string(), value).is_some() {
            return Err(IpError::Parse { line, message: format!("`{name}` given twice") });
        }
    }
    Ok(solution)
}

pub fn read_solution<T: Scalar>(path: impl AsRef<Path>) -> Result<IpSolution<T>, IpError> {
    parse_solution(&std::fs::read_to_string(path)?)
}

/// Outcome of checking a solver's answer against the model and the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub variant: Variant,
    pub subsidy_set: NodeSet,
    /// Model objective at the (rounded) solution.
    pub objective: Rational,
    pub claimed_objective: Option<Rational>,
    /// Long-term adoption of the decoded subsidy set under the true dynamics.
    pub simulated_adoption: Rational,
    /// The solution's adoption variables never claim more than the dynamics
    /// deliver at the horizon.
    pub lag_audit: bool,
    /// Optimum found by exhaustive search, for small instances.
    pub exact_objective: Option<Rational>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "feasible: yes")?;
        writeln!(f, "variant: {}", self.variant)?;
        let nodes: Vec<String> = self.subsidy_set.iter().map(|i| i.to_string()).collect();
        writeln!(f, "subsidy_set: {}", nodes.join(" "))?;
        writeln!(f, "objective: {}", self.objective)?;
        if let Some(c) = &self.claimed_objective {
            writeln!(f, "claimed_objective: {c}")?;
        }
        writeln!(f, "simulated_adoption: {}/{}", self.simulated_adoption.numer(), self.simulated_adoption.denom())?;
        writeln!(f, "lag_audit: {}", if self.lag_audit { "pass" } else { "fail" })?;
        if let Some(e) = &self.exact_objective {
            writeln!(f, "exact_objective: {e}")?;
        }
        Ok(())
    }
}

/// Shape of a generated model, recovered from its variable and row names.
struct Shape {
    variant: Variant,
    /// Last subsidized state index.
    forced_last: usize,
    horizon: usize,
}

fn shape_of<T: Scalar>(model: &IpModel<T>, n: usize) -> Result<Shape, IpError> {
    let horizon = model.variables.iter().filter_map(|v| parse_x_name(&v.name)).map(|(_, t)| t).max();
    let forced_last = model
        .constraints
        .iter()
        .filter_map(|c| c.name.strip_prefix("grow_"))
        .filter_map(|rest| rest.rsplit_once('_')?.1.parse::<usize>().ok())
        .max();
    let (Some(horizon), Some(forced_last)) = (horizon, forced_last) else {
        return Err(IpError::UnknownVariable("x<i>_<t>".into()));
    };
    let temporary = forced_last == n && horizon == 2 * n;
    let variant = match (model.objective.sense, temporary) {
        (ObjectiveSense::Minimize, true) => Variant::TempMcc,
        (ObjectiveSense::Maximize, true) => Variant::TempBmc,
        (ObjectiveSense::Minimize, false) => Variant::FdMcc,
        (ObjectiveSense::Maximize, false) => Variant::FdBmc,
    };
    Ok(Shape { variant, forced_last, horizon })
}

fn to_rational<T: Scalar>(v: &T) -> Result<Rational, IpError> {
    v.to_rational().ok_or_else(|| IpError::NotRational(v.to_string()))
}

/// Rebuilds the planning problem a model encodes: costs or budget from the
/// budget row, target from the final rows.
fn problem_of<T: Scalar>(
    model: &IpModel<T>,
    shape: &Shape,
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
) -> Result<PlanningProblem<T>, IpError> {
    let n = graph.node_count();
    let d = if shape.variant.is_fd() { shape.forced_last + 1 } else { 0 };
    let budget_row = model.constraints.iter().find(|c| c.name == "budget");
    let k = match (shape.variant.is_mcc(), budget_row) {
        (false, Some(row)) => row.rhs.to_usize().unwrap_or(n),
        _ => 0,
    };
    let mut problem = PlanningProblem::new(shape.variant, graph.clone(), thresholds.clone(), d, k)?;
    if shape.variant.is_mcc() {
        if let Some(row) = budget_row {
            let mut costs = vec![T::one(); n];
            for (c, v) in &row.terms {
                if let Some(i) = parse_y_name(&model.variables[*v].name).filter(|&i| i < n) {
                    costs[i] = c.clone();
                }
            }
            problem = problem.with_costs(costs)?;
        }
        let target = NodeSet::from_indices(
            n,
            model
                .constraints
                .iter()
                .filter_map(|c| c.name.strip_prefix("final_"))
                .filter_map(|rest| rest.split_once('_')?.0.parse::<usize>().ok())
                .filter(|&i| i < n),
        );
        problem = problem.with_target(target)?;
    }
    Ok(problem)
}

/// States `0..=horizon` under the model's forcing pattern.
fn states_to_horizon<T: Scalar>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    subsidized: &NodeSet,
    shape: &Shape,
) -> Result<Vec<NodeSet>, IpError> {
    let n = graph.node_count();
    let mut x = subsidized.clone();
    for i in thresholds.unconditional_nodes() {
        x.insert(i);
    }
    let none = NodeSet::empty(n);
    let mut states = vec![x];
    for t in 1..=shape.horizon {
        let forced = if t <= shape.forced_last { subsidized } else { &none };
        let next = step(graph, thresholds, &states[t - 1], forced)?;
        states.push(next);
    }
    Ok(states)
}

/// Rounds integer variables, checks every bound and row, decodes the subsidy
/// set and replays it through the dynamics.
///
/// Fails with [`IpError::NotBinary`] for values more than 1e-6 away from an
/// integer and with [`IpError::Violated`] naming the first broken row.
/// Variables absent from the solution are taken as 0.
pub fn decode_and_verify<T: Scalar>(
    model: &IpModel<T>,
    solution: &IpSolution<T>,
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
) -> Result<VerificationReport, IpError> {
    let n = graph.node_count();
    if thresholds.len() != n {
        return Err(IpError::LengthMismatch { expected: n, got: thresholds.len() });
    }
    let index = model.name_index();
    if let Some(name) = solution.values.keys().find(|k| !index.contains_key(k.as_str())) {
        return Err(IpError::UnknownVariable(name.clone()));
    }
    let mut values = Vec::with_capacity(model.variables.len());
    for var in &model.variables {
        let raw = solution.values.get(&var.name).cloned().unwrap_or_else(T::zero);
        let value = if var.kind == VarKind::Continuous {
            raw
        } else {
            let r = to_rational(&raw)?;
            let rounded = r.round();
            if (r - rounded).abs().to_f64().unwrap_or(f64::INFINITY) > INTEGRALITY_TOL {
                return Err(IpError::NotBinary(var.name.clone()));
            }
            T::from_rational(&rounded)
        };
        values.push(value);
    }
    model.check(&values)?;

    let shape = shape_of(model, n)?;
    let one = T::one();
    let subsidy_set = NodeSet::from_indices(
        n,
        model
            .variables
            .iter()
            .zip(&values)
            .filter(|(v, value)| **value == one && parse_y_name(&v.name).is_some())
            .filter_map(|(v, _)| parse_y_name(&v.name))
            .filter(|&i| i < n),
    );
    let schedule = if shape.variant.is_fd() {
        SubsidySchedule::fixed_duration(subsidy_set.clone(), shape.forced_last + 1)?
    } else {
        SubsidySchedule::temporary(subsidy_set.clone())
    };
    let simulated_adoption = limit(graph, thresholds, &schedule)?.adoption(n);

    let states = states_to_horizon(graph, thresholds, &subsidy_set, &shape)?;
    let objective = to_rational(&model.objective_value(&values))?;
    let lag_audit = if shape.variant.is_mcc() {
        model
            .constraints
            .iter()
            .filter_map(|c| c.name.strip_prefix("final_"))
            .filter_map(|rest| {
                let (i, t) = rest.split_once('_')?;
                Some((i.parse::<usize>().ok()?, t.parse::<usize>().ok()?))
            })
            .all(|(i, t)| states.get(t).is_some_and(|s| s.contains(i)))
    } else {
        let delivered = if shape.variant.is_fd() {
            Rational::new((states[shape.horizon - 1].count() + states[shape.horizon].count()) as i64, 2)
        } else {
            Rational::from_integer(states[shape.horizon].count() as i64)
        };
        objective <= delivered
    };

    let exact_objective = if n <= EXACT_NODE_LIMIT {
        let problem = problem_of(model, &shape, graph, thresholds)?;
        let options = SolveOptions { time_budget: Some(EXACT_TIME_BUDGET), ..SolveOptions::default() };
        match solve_exact(&problem, &options) {
            Ok(res) if shape.variant.is_mcc() => Some(to_rational(&res.objective)?),
            Ok(res) => Some(res.certificate.longterm_adoption * Rational::from_integer(n as i64)),
            Err(OptimizeError::Timeout | OptimizeError::Infeasible) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let claimed_objective = solution.objective.as_ref().map(to_rational).transpose()?;
    Ok(VerificationReport {
        variant: shape.variant,
        subsidy_set,
        objective,
        claimed_objective,
        simulated_adoption,
        lag_audit,
        exact_objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ip_gen::{build_fd_bmc, build_temp_bmc, build_temp_mcc};

    fn path4() -> (Graph, ThresholdProfile<Rational>) {
        let g = Graph::path(4).unwrap();
        let th = ThresholdProfile::uniform(&g, Rational::new(1, 2)).unwrap();
        (g, th)
    }

    /// Hand solution: subsidize node 0 and let adoption run along the path.
    fn path_solution() -> String {
        let mut s = String::from("# hand solution\nq 1\ny0 1\n");
        for t in 0..=8 {
            for i in 0..4 {
                if i <= t {
                    s.push_str(&format!("x{i}_{t} 1\n"));
                }
            }
        }
        s
    }

    #[test]
    fn hand_solution_verifies() {
        let (g, th) = path4();
        let m = build_temp_mcc(&g, &th, &[Rational::from_integer(1); 4]).unwrap();
        let sol: IpSolution<Rational> = parse_solution(&path_solution()).unwrap();
        let report = decode_and_verify(&m, &sol, &g, &th).unwrap();
        assert_eq!(report.subsidy_set.to_vec(), vec![0]);
        assert_eq!(report.objective, Rational::from_integer(1));
        assert_eq!(report.simulated_adoption, Rational::from_integer(1));
        assert!(report.lag_audit);
        assert_eq!(report.exact_objective, Some(Rational::from_integer(1)));
        let text = report.to_string();
        assert!(text.starts_with("feasible: yes\n"));
        assert!(text.contains("simulated_adoption: 1/1\n"));
    }

    #[test]
    fn premature_jump_names_the_row() {
        let (g, th) = path4();
        let m = build_temp_mcc(&g, &th, &[Rational::from_integer(1); 4]).unwrap();
        let text = path_solution().replace("x0_0 1\n", "x0_0 1\nx3_1 1\n");
        let sol: IpSolution<Rational> = parse_solution(&text).unwrap();
        match decode_and_verify(&m, &sol, &g, &th) {
            Err(IpError::Violated(row)) => assert_eq!(row, "grow_3_1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lagged_zero_solution_is_feasible_for_bmc() {
        let (g, th) = path4();
        let m = build_temp_bmc(&g, &th, 1).unwrap();
        let sol: IpSolution<Rational> = parse_solution("y2 1\n").unwrap();
        let report = decode_and_verify(&m, &sol, &g, &th).unwrap();
        assert_eq!(report.objective, Rational::from_integer(0));
        assert_eq!(report.simulated_adoption, Rational::from_integer(1));
        assert!(report.lag_audit);
        assert_eq!(report.exact_objective, Some(Rational::from_integer(4)));
    }

    #[test]
    fn fd_model_shape_is_recognized() {
        let (g, th) = path4();
        let m = build_fd_bmc(&g, &th, 2, 1).unwrap();
        let report = decode_and_verify(&m, &parse_solution("y0 1").unwrap(), &g, &th).unwrap();
        assert_eq!(report.variant, Variant::FdBmc);
    }

    #[test]
    fn rejections() {
        let (g, th) = path4();
        let m = build_temp_bmc(&g, &th, 1).unwrap();
        let half: IpSolution<Rational> = parse_solution("y0 0.5").unwrap();
        assert!(matches!(decode_and_verify(&m, &half, &g, &th), Err(IpError::NotBinary(_))));
        let nearly: IpSolution<Rational> = parse_solution("y0 0.9999999").unwrap();
        assert!(decode_and_verify(&m, &nearly, &g, &th).is_ok());
        let unknown: IpSolution<Rational> = parse_solution("z 1").unwrap();
        assert!(matches!(decode_and_verify(&m, &unknown, &g, &th), Err(IpError::UnknownVariable(_))));
        let over: IpSolution<Rational> = parse_solution("y0 1\ny1 1").unwrap();
        assert!(matches!(decode_and_verify(&m, &over, &g, &th), Err(IpError::Violated(r)) if r == "budget"));
        assert!(matches!(parse_solution::<Rational>("y0"), Err(IpError::Parse { line: 1, .. })));
        assert!(matches!(parse_solution::<Rational>("y0 1\ny0 1"), Err(IpError::Parse { line: 2, .. })));
    }
}
