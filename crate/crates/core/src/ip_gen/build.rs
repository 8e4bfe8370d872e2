use crate::dynamics::intransigence_closure;
use crate::graph::{Graph, ThresholdProfile};
use crate::nodeset::NodeSet;
use crate::optimize::{PlanningProblem, Variant};
use crate::scalar::{is_integral, Scalar};

use super::{Constraint, IpError, IpModel, ObjectiveSense, Sense, VarKind};

enum Budget<'a, T> {
    Cost(&'a [T]),
    Count(usize),
}

struct Layout {
    /// States `0..=forced_last` are subsidized.
    forced_last: usize,
    horizon: usize,
}

fn x_name(i: usize, t: usize) -> String {
    format!("x{i}_{t}")
}

fn build<T: Scalar>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    layout: Layout,
    budget: Budget<'_, T>,
    target: Option<&NodeSet>,
    fd: bool,
) -> Result<IpModel<T>, IpError> {
    let n = graph.node_count();
    if thresholds.len() != n {
        return Err(IpError::LengthMismatch { expected: n, got: thresholds.len() });
    }
    let b = thresholds.b();
    let sense = match budget {
        Budget::Cost(_) => ObjectiveSense::Minimize,
        Budget::Count(_) => ObjectiveSense::Maximize,
    };
    let mut model = IpModel::new(sense);

    let q = match budget {
        Budget::Cost(costs) => {
            if costs.len() != n {
                return Err(IpError::LengthMismatch { expected: n, got: costs.len() });
            }
            let kind = if costs.iter().all(is_integral) { VarKind::Integer } else { VarKind::Continuous };
            Some(model.add_variable("q".into(), kind))
        }
        Budget::Count(_) => None,
    };
    let y: Vec<usize> = (0..n).map(|i| model.add_variable(format!("y{i}"), VarKind::Binary)).collect();
    let horizon = layout.horizon;
    let x: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..=horizon).map(|t| model.add_variable(x_name(i, t), VarKind::Binary)).collect())
        .collect();

    let one = T::one();
    match budget {
        Budget::Cost(costs) => {
            let mut terms: Vec<(T, usize)> = (0..n).map(|i| (costs[i].clone(), y[i])).collect();
            terms.push((-one.clone(), q.expect("MCC models have q")));
            model.constraints.push(Constraint { name: "budget".into(), terms, sense: Sense::Le, rhs: T::zero() });
        }
        Budget::Count(k) => {
            let terms = (0..n).map(|i| (one.clone(), y[i])).collect();
            model.constraints.push(Constraint { name: "budget".into(), terms, sense: Sense::Le, rhs: T::from_count(k) });
        }
    }

    for i in 0..n {
        for t in 0..=horizon {
            let forced = t <= layout.forced_last;
            let name = format!("{}_{i}_{t}", if forced { "grow" } else { "hold" });
            let row = if b[i] == 0 {
                Constraint { name, terms: vec![(one.clone(), x[i][t])], sense: Sense::Le, rhs: one.clone() }
            } else {
                let mut terms = vec![(one.clone(), x[i][t])];
                if t > 0 {
                    let w = -T::from_ratio(1, b[i] as i64);
                    terms.extend(graph.neighbors(i).iter().map(|&j| (w.clone(), x[j][t - 1])));
                }
                if forced {
                    terms.push((-one.clone(), y[i]));
                }
                Constraint { name, terms, sense: Sense::Le, rhs: T::zero() }
            };
            model.constraints.push(row);
        }
    }

    match budget {
        Budget::Cost(_) => {
            let closure;
            let target = match target {
                Some(t) => t,
                None => {
                    closure = intransigence_closure(graph, thresholds).complement();
                    &closure
                }
            };
            let final_times: Vec<usize> = if fd { vec![horizon - 1, horizon] } else { vec![horizon] };
            for i in target.iter() {
                for &t in &final_times {
                    model.constraints.push(Constraint {
                        name: format!("final_{i}_{t}"),
                        terms: vec![(one.clone(), x[i][t])],
                        sense: Sense::Ge,
                        rhs: one.clone(),
                    });
                }
            }
            model.objective.terms = vec![(one, q.expect("MCC models have q"))];
        }
        Budget::Count(_) => {
            model.objective.terms = if fd {
                let half = T::half();
                (0..n).flat_map(|i| [(half.clone(), x[i][horizon - 1]), (half.clone(), x[i][horizon])]).collect()
            } else {
                (0..n).map(|i| (one.clone(), x[i][horizon])).collect()
            };
        }
    }
    Ok(model)
}

fn temp_layout(graph: &Graph) -> Layout {
    let n = graph.node_count();
    Layout { forced_last: n, horizon: 2 * n }
}

fn fd_layout(graph: &Graph, d: usize) -> Result<Layout, IpError> {
    if d == 0 {
        return Err(IpError::ZeroDuration);
    }
    Ok(Layout { forced_last: d - 1, horizon: d + 2 * graph.edge_count() + graph.node_count() })
}

/// Forced rows for `t = 0..=|V|`, released rows up to `2|V|`, and final rows
/// for every node outside the intransigence closure.
pub fn build_temp_mcc<T: Scalar>(graph: &Graph, thresholds: &ThresholdProfile<T>, costs: &[T]) -> Result<IpModel<T>, IpError> {
    build(graph, thresholds, temp_layout(graph), Budget::Cost(costs), None, false)
}

pub fn build_temp_bmc<T: Scalar>(graph: &Graph, thresholds: &ThresholdProfile<T>, k: usize) -> Result<IpModel<T>, IpError> {
    build(graph, thresholds, temp_layout(graph), Budget::Count(k), None, false)
}

/// Forced rows for `t < d`, released rows up to `T = d + 2|E| + |V|`, final
/// rows at `T - 1` and `T`.
pub fn build_fd_mcc<T: Scalar>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    d: usize,
    costs: &[T],
) -> Result<IpModel<T>, IpError> {
    build(graph, thresholds, fd_layout(graph, d)?, Budget::Cost(costs), None, true)
}

/// Objective is the average Green count over the last two time steps.
pub fn build_fd_bmc<T: Scalar>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    d: usize,
    k: usize,
) -> Result<IpModel<T>, IpError> {
    build(graph, thresholds, fd_layout(graph, d)?, Budget::Count(k), None, true)
}

/// Model for a planning problem, honoring its costs and completeness target.
pub fn build_model<T: Scalar>(problem: &PlanningProblem<T>) -> Result<IpModel<T>, IpError> {
    let g = problem.graph();
    let th = problem.thresholds();
    let target = Some(problem.target());
    match problem.variant() {
        Variant::TempMcc => build(g, th, temp_layout(g), Budget::Cost(problem.costs()), target, false),
        Variant::TempBmc => build(g, th, temp_layout(g), Budget::Count(problem.budget().unwrap_or(0)), None, false),
        Variant::FdMcc => {
            let layout = fd_layout(g, problem.duration().unwrap_or(0))?;
            build(g, th, layout, Budget::Cost(problem.costs()), target, true)
        }
        Variant::FdBmc => {
            let layout = fd_layout(g, problem.duration().unwrap_or(0))?;
            build(g, th, layout, Budget::Count(problem.budget().unwrap_or(0)), None, true)
        }
    }
}
