use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use greenspread::dynamics::{format_trajectory, run, SubsidySchedule};
use greenspread::graph::{
    format_graph, gen_class1, gen_class2, gen_random, gen_rewired_clusters, gen_star, metrics as graph_metrics,
    read_graph, RewireMode, ThresholdProfile,
};
use greenspread::ip_gen::{build_model, decode_and_verify, export_lp, parse_lp, read_solution, IpError, LpMode};
use greenspread::optimize::{greedy, random_baseline, solve_exact, PlanResult, SolveOptions};
use greenspread::{Graph, NodeSet, Problem, Rational, Thresholds};

use crate::error::CliError;
use crate::{ExportArgs, Family, GenArgs, LpModeArg, Method, MetricsArgs, OptimizeArgs, ProblemArgs, SimulateArgs, VerifyArgs};

fn need<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{family} requires --{flag}")))
}

fn emit(text: String, out: Option<&Path>) -> Result<String, CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn load(path: &Path) -> Result<(Graph, Thresholds), CliError> {
    read_graph::<Rational>(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn gen(a: &GenArgs, seed: u64) -> Result<String, CliError> {
    let half = Rational::new(1, 2);
    let alpha = a.alpha.unwrap_or(half);
    let (graph, th) = match a.family {
        Family::Class1 => gen_class1(need(a.n, "n", "class1")?)?,
        Family::Class2 => gen_class2(need(a.n, "n", "class2")?)?,
        Family::Star => gen_star(need(a.leaves, "leaves", "star")?, alpha)?,
        Family::Random => {
            let g = gen_random(need(a.n, "n", "random")?, need(a.p, "p", "random")?, seed)?;
            let th = ThresholdProfile::uniform(&g, alpha)?;
            (g, th)
        }
        Family::Rewired => {
            let mode = if a.drop_duplicates { RewireMode::DropDuplicates } else { RewireMode::Resample };
            let g = gen_rewired_clusters(
                need(a.clusters, "clusters", "rewired")?,
                need(a.size, "size", "rewired")?,
                need(a.p, "p", "rewired")?,
                seed,
                mode,
            )?;
            let th = ThresholdProfile::uniform(&g, alpha)?;
            (g, th)
        }
    };
    emit(format_graph(&graph, &th), a.out.as_deref())
}

fn node_set(n: usize, nodes: &[usize]) -> Result<NodeSet, CliError> {
    if let Some(bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(CliError::Data(format!("node {bad} out of range for a graph with {n} nodes")));
    }
    Ok(NodeSet::from_indices(n, nodes.iter().copied()))
}

pub fn simulate(a: &SimulateArgs) -> Result<String, CliError> {
    let (g, th) = load(&a.graph)?;
    let s = node_set(g.node_count(), &a.subsidize)?;
    let schedule = match (a.fd, a.indefinite) {
        (Some(0), _) => return Err(CliError::Usage("--fd needs at least one step".into())),
        (Some(d), _) => SubsidySchedule::fixed_duration(s, d)?,
        (None, true) => SubsidySchedule::indefinite(s),
        (None, false) => SubsidySchedule::temporary(s),
    };
    let (traj, report) = run(&g, &th, &schedule)?;
    let mut out = format_trajectory(&traj, &report);
    if let Some(g) = report.subsidy_duration {
        let _ = writeln!(out, "subsidy_duration={g}");
    }
    if a.energy {
        if let Some(start) = report.energy_start {
            for (k, e) in report.energy_trace.iter().enumerate() {
                let _ = writeln!(out, "energy t={} {e}", start + k);
            }
        }
    }
    Ok(out)
}

pub fn problem(a: &ProblemArgs) -> Result<Problem, CliError> {
    let (g, th) = load(&a.graph)?;
    let v = a.variant;
    if v.is_fd() && a.d.is_none() {
        return Err(CliError::Usage(format!("{v} requires --d")));
    }
    if !v.is_mcc() && a.k.is_none() {
        return Err(CliError::Usage(format!("{v} requires --k")));
    }
    if !v.is_mcc() && !a.costs.is_empty() {
        return Err(CliError::Usage("--costs applies to MCC variants only".into()));
    }
    let mut p = Problem::new(v, g, th, a.d.unwrap_or(0), a.k.unwrap_or(0))?;
    if !a.costs.is_empty() {
        p = p.with_costs(a.costs.clone())?;
    }
    Ok(p)
}

fn format_plan(p: &Problem, res: &PlanResult<Rational>, method: &str) -> String {
    let mut out = String::new();
    let nodes: Vec<String> = res.subsidy_set.iter().map(|i| i.to_string()).collect();
    let a = res.certificate.longterm_adoption;
    let _ = writeln!(out, "variant={} method={method}", p.variant());
    let _ = writeln!(out, "subsidy_set={}", nodes.join(","));
    let _ = writeln!(out, "objective={}", res.objective);
    let _ = writeln!(out, "adoption={}/{}", a.numer(), a.denom());
    let _ = writeln!(out, "optimal={}", res.optimal);
    let _ = writeln!(out, "cycle={} transient={}", res.certificate.cycle.len(), res.certificate.transient);
    let _ = writeln!(out, "nodes_explored={}", res.nodes_explored);
    out
}

pub fn optimize(a: &OptimizeArgs, seed: u64) -> Result<String, CliError> {
    let p = problem(&a.problem)?;
    match a.method {
        Method::Exact => {
            let options = SolveOptions { node_cap: a.node_cap, time_budget: a.time_budget_ms.map(Duration::from_millis) };
            let res = solve_exact(&p, &options)?;
            Ok(format_plan(&p, &res, "exact"))
        }
        Method::Greedy => Ok(format_plan(&p, &greedy(&p)?, "greedy")),
        Method::Random => {
            let size = a
                .size
                .or(p.budget())
                .ok_or_else(|| CliError::Usage("random needs --size for MCC variants".into()))?;
            let summary = random_baseline(&p, size, a.trials, seed)?;
            let mut out = String::new();
            let _ = writeln!(out, "variant={} method=random size={size} trials={} seed={seed}", p.variant(), a.trials);
            for (s, v) in summary.sets.iter().zip(&summary.values) {
                let nodes: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                let _ = writeln!(out, "set={} adoption={v}", nodes.join(","));
            }
            let _ = writeln!(out, "random_mean={}", summary.mean);
            let _ = writeln!(out, "random_min={}", summary.min);
            let _ = writeln!(out, "random_max={}", summary.max);
            Ok(out)
        }
    }
}

pub fn export_ip(a: &ExportArgs) -> Result<String, CliError> {
    let p = problem(&a.problem)?;
    let model = build_model(&p)?;
    let mode = match a.mode {
        LpModeArg::Scaled => LpMode::Scaled,
        LpModeArg::Decimal => LpMode::Decimal,
    };
    emit(export_lp(&model, mode)?, a.out.as_deref())
}

pub fn verify(a: &VerifyArgs) -> Result<String, CliError> {
    let (g, th) = load(&a.graph)?;
    let text = std::fs::read_to_string(&a.model)?;
    let model = parse_lp::<Rational>(&text).map_err(|e| CliError::Data(format!("{}: {e}", a.model.display())))?;
    let solution = read_solution::<Rational>(&a.solution).map_err(|e| CliError::Data(format!("{}: {e}", a.solution.display())))?;
    match decode_and_verify(&model, &solution, &g, &th) {
        Ok(report) if report.lag_audit => Ok(report.to_string()),
        Ok(report) => {
            print!("{report}");
            Err(CliError::Internal("adoption variables exceed the simulated dynamics".into()))
        }
        Err(IpError::Violated(row)) => {
            println!("feasible: no");
            println!("violated: {row}");
            Err(CliError::Data(format!("constraint `{row}` is violated")))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn metrics(a: &MetricsArgs) -> Result<String, CliError> {
    let (g, _) = load(&a.graph)?;
    let m = graph_metrics(&g);
    let mut out = String::new();
    let _ = writeln!(out, "nodes={}", g.node_count());
    let _ = writeln!(out, "edges={}", g.edge_count());
    let _ = writeln!(out, "clustering={:.6}", m.clustering_coefficient);
    match m.avg_path_length {
        Some(l) => writeln!(out, "avg_path_length={l:.6}"),
        None => writeln!(out, "avg_path_length=NA"),
    }
    .ok();
    let _ = writeln!(out, "avg_degree={:.6}", m.avg_degree);
    let _ = writeln!(out, "connected={}", m.connected);
    Ok(out)
}
