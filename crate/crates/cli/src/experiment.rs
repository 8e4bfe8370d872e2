use std::fmt::Write as _;
use std::time::{Duration, Instant};

use greenspread::graph::{gen_random, gen_rewired_clusters, metrics, ThresholdProfile};
use greenspread::optimize::{random_baseline, solve_exact, OptimizeError, SolveOptions};
use greenspread::{Graph, Problem, Rational};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::config::{parse_config, ExperimentConfig, Generator};
use crate::error::CliError;
use crate::ExperimentArgs;

pub const HEADER: &str = "seed,p,alpha,C,L,variant,k,opt_size_or_adoption,random_mean,random_min,random_max,solve_ms";

/// One `(seed, p, alpha, k)` point of the sweep.
#[derive(Debug, Clone)]
pub struct Cell {
    pub seed: u64,
    pub p: f64,
    pub alpha: Rational,
    pub k: Option<usize>,
}

pub fn cells(config: &ExperimentConfig) -> Vec<Cell> {
    let ks: Vec<Option<usize>> = if config.k.is_empty() { vec![None] } else { config.k.iter().copied().map(Some).collect() };
    let mut out = Vec::new();
    for &seed in &config.seeds {
        for &p in &config.p {
            for &alpha in &config.alpha {
                for &k in &ks {
                    out.push(Cell { seed, p, alpha, k });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.seed.cmp(&b.seed).then(a.p.total_cmp(&b.p)).then(a.alpha.cmp(&b.alpha)).then(a.k.cmp(&b.k))
    });
    out
}

fn generate(config: &ExperimentConfig, cell: &Cell) -> Result<Graph, CliError> {
    Ok(match &config.generator {
        Generator::Rewired { clusters, size, mode } => gen_rewired_clusters(*clusters, *size, cell.p, cell.seed, *mode)?,
        Generator::Random { n } => gen_random(*n, cell.p, cell.seed)?,
    })
}

fn dec(r: &Rational) -> String {
    format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))
}

/// Evaluates one cell; the row depends only on the config and the cell.
pub fn run_cell(config: &ExperimentConfig, cell: &Cell, timing: bool) -> Result<String, CliError> {
    let graph = generate(config, cell)?;
    let m = metrics(&graph);
    let th = ThresholdProfile::uniform(&graph, cell.alpha)?;
    let problem = Problem::new(config.variant, graph, th, config.d.unwrap_or(0), cell.k.unwrap_or(0))?;
    let options =
        SolveOptions { node_cap: config.node_cap, time_budget: config.time_budget_ms.map(Duration::from_millis) };

    let start = Instant::now();
    let solved = solve_exact(&problem, &options);
    let solve_ms = if timing { start.elapsed().as_millis() } else { 0 };

    let (opt, random_size) = match &solved {
        Ok(res) if config.variant.is_mcc() => (res.subsidy_set.count().to_string(), Some(res.subsidy_set.count())),
        Ok(res) => (dec(&res.certificate.longterm_adoption), cell.k),
        Err(OptimizeError::Timeout) => ("timeout".to_string(), cell.k),
        Err(OptimizeError::Infeasible) => ("infeasible".to_string(), cell.k),
        Err(e) => return Err(e.clone().into()),
    };
    let random = match random_size {
        Some(size) => {
            let s = random_baseline(&problem, size, config.trials, cell.seed)?;
            [dec(&s.mean), dec(&s.min), dec(&s.max)]
        }
        None => Default::default(),
    };
    let mut row = String::new();
    let _ = write!(
        row,
        "{},{},{},{:.6},{},{},{},{},{},{},{},{}",
        cell.seed,
        cell.p,
        cell.alpha,
        m.clustering_coefficient,
        m.avg_path_length.map_or("NA".to_string(), |l| format!("{l:.6}")),
        config.variant,
        cell.k.map_or(String::new(), |k| k.to_string()),
        opt,
        random[0],
        random[1],
        random[2],
        solve_ms
    );
    Ok(row)
}

pub fn run_config(config: &ExperimentConfig, threads: Option<usize>, timing: bool) -> Result<String, CliError> {
    let cells = cells(config);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<String> = pool.install(|| cells.par_iter().map(|c| run_cell(config, c, timing)).collect::<Result<_, _>>())?;
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

pub fn run(a: &ExperimentArgs) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&a.config)?;
    let config = parse_config(&text).map_err(|e| CliError::Data(format!("{}: {e}", a.config.display())))?;
    if a.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let csv = run_config(&config, a.threads, !a.no_timing)?;
    match a.out.as_ref().or(config.output.as_ref()) {
        Some(path) => {
            std::fs::write(path, csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}
