//! Line-oriented `key value...` experiment configuration.
//!
//! ```text
//! # five 6-cliques, three rewiring levels
//! family rewired
//! clusters 5
//! size 6
//! p 0 0.1 0.3
//! seeds 1 2 3
//! alpha 1/6 1/3 1/2
//! variant tempMCC
//! trials 10
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use greenspread::graph::RewireMode;
use greenspread::optimize::{Variant, DEFAULT_NODE_CAP};
use greenspread::scalar::parse_rational;
use greenspread::Rational;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("config: {0}")]
    Missing(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `clusters` cliques of `size` nodes, each edge rewired with probability `p`.
    Rewired { clusters: usize, size: usize, mode: RewireMode },
    /// `G(n, p)`.
    Random { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub generator: Generator,
    pub p: Vec<f64>,
    pub seeds: Vec<u64>,
    pub alpha: Vec<Rational>,
    pub variant: Variant,
    pub d: Option<usize>,
    /// Budgets for BMC variants; empty for MCC.
    pub k: Vec<usize>,
    /// Random sets drawn per cell.
    pub trials: usize,
    pub time_budget_ms: Option<u64>,
    pub node_cap: usize,
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "family", "clusters", "size", "n", "p", "seeds", "alpha", "variant", "d", "k", "trials", "time_budget_ms",
    "node_cap", "rewire", "output",
];

struct Entry {
    line: usize,
    values: Vec<String>,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Line { line, message: message.into() })
}

fn list<T>(e: &Entry, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, ConfigError> {
    if e.values.is_empty() {
        return err(e.line, format!("empty {key} grid"));
    }
    e.values
        .iter()
        .map(|v| match parse(v) {
            Some(x) => Ok(x),
            None => err(e.line, format!("invalid {key} value `{v}`")),
        })
        .collect()
}

fn single<T>(e: &Entry, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<T, ConfigError> {
    match e.values.as_slice() {
        [v] => match parse(v) {
            Some(x) => Ok(x),
            None => err(e.line, format!("invalid {key} value `{v}`")),
        },
        _ => err(e.line, format!("{key} takes exactly one value")),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut toks = content.split_whitespace();
        let Some(key) = toks.next() else { continue };
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return err(line, format!("unknown key `{key}`"));
        };
        if entries.contains_key(key) {
            return err(line, format!("`{key}` given twice"));
        }
        entries.insert(key, Entry { line, values: toks.map(str::to_string).collect() });
    }
    let get = |key: &str| entries.get(key);
    let need = |key: &str| get(key).ok_or_else(|| ConfigError::Missing(format!("missing `{key}`")));
    let usize_of = |s: &str| s.parse::<usize>().ok();

    let family = single(need("family")?, "family", |s| Some(s.to_string()))?;
    let mode = match get("rewire") {
        None => RewireMode::Resample,
        Some(e) => single(e, "rewire", |s| match s {
            "resample" => Some(RewireMode::Resample),
            "drop" => Some(RewireMode::DropDuplicates),
            _ => None,
        })?,
    };
    let generator = match family.as_str() {
        "rewired" => Generator::Rewired {
            clusters: single(need("clusters")?, "clusters", usize_of)?,
            size: single(need("size")?, "size", usize_of)?,
            mode,
        },
        "random" => Generator::Random { n: single(need("n")?, "n", usize_of)? },
        other => return err(need("family")?.line, format!("unknown family `{other}` (rewired or random)")),
    };

    let p_entry = need("p")?;
    let p = list(p_entry, "p", |s| s.parse::<f64>().ok().filter(|p| (0.0..=1.0).contains(p)))?;
    let seeds = list(need("seeds")?, "seeds", |s| s.parse::<u64>().ok())?;
    let alpha = list(need("alpha")?, "alpha", |s| parse_rational(s).filter(|a| *a >= Rational::from_integer(0)))?;
    let variant_entry = need("variant")?;
    let variant = single(variant_entry, "variant", |s| s.parse::<Variant>().ok())?;

    let d = match (variant.is_fd(), get("d")) {
        (true, Some(e)) => Some(single(e, "d", |s| usize_of(s).filter(|d| *d >= 1))?),
        (true, None) => return err(variant_entry.line, format!("{variant} needs `d`")),
        (false, Some(e)) => return err(e.line, format!("`d` does not apply to {variant}")),
        (false, None) => None,
    };
    let k = match (variant.is_mcc(), get("k")) {
        (false, Some(e)) => list(e, "k", usize_of)?,
        (false, None) => return err(variant_entry.line, format!("{variant} needs `k`")),
        (true, Some(e)) => return err(e.line, format!("`k` does not apply to {variant}")),
        (true, None) => Vec::new(),
    };
    let trials = match get("trials") {
        Some(e) => single(e, "trials", |s| usize_of(s).filter(|t| *t >= 1))?,
        None => 10,
    };
    let time_budget_ms = get("time_budget_ms").map(|e| single(e, "time_budget_ms", |s| s.parse().ok())).transpose()?;
    let node_cap = match get("node_cap") {
        Some(e) => single(e, "node_cap", usize_of)?,
        None => DEFAULT_NODE_CAP,
    };
    let output = get("output").map(|e| single(e, "output", |s| Some(PathBuf::from(s)))).transpose()?;
    Ok(ExperimentConfig { generator, p, seeds, alpha, variant, d, k, trials, time_budget_ms, node_cap, output })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = "# sweep\nfamily rewired\nclusters 5\nsize 6\np 0 0.1 0.3\nseeds 1 2 3\nalpha 1/6 1/3 1/2\nvariant tempMCC\n";

    #[test]
    fn parses_a_sweep() {
        let c = parse_config(SWEEP).unwrap();
        assert_eq!(c.generator, Generator::Rewired { clusters: 5, size: 6, mode: RewireMode::Resample });
        assert_eq!(c.p, vec![0.0, 0.1, 0.3]);
        assert_eq!(c.alpha[0], Rational::new(1, 6));
        assert_eq!(c.trials, 10);
        assert!(c.k.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let empty_alpha = SWEEP.replace("alpha 1/6 1/3 1/2", "alpha");
        assert_eq!(
            parse_config(&empty_alpha),
            Err(ConfigError::Line { line: 7, message: "empty alpha grid".into() })
        );
        let bad = format!("{SWEEP}colour green\n");
        assert!(matches!(parse_config(&bad), Err(ConfigError::Line { line: 9, .. })));
        let twice = format!("{SWEEP}seeds 4\n");
        assert!(matches!(parse_config(&twice), Err(ConfigError::Line { line: 9, .. })));
        let bmc = SWEEP.replace("tempMCC", "fdBMC");
        assert!(matches!(parse_config(&bmc), Err(ConfigError::Line { line: 8, .. })));
        let k_for_mcc = format!("{SWEEP}k 1\n");
        assert!(matches!(parse_config(&k_for_mcc), Err(ConfigError::Line { line: 9, .. })));
        let p_range = SWEEP.replace("p 0 0.1 0.3", "p 0 1.5");
        assert!(matches!(parse_config(&p_range), Err(ConfigError::Line { line: 5, .. })));
        assert!(matches!(parse_config("family rewired\n"), Err(ConfigError::Missing(_))));
    }

    #[test]
    fn bmc_grid() {
        let text = SWEEP.replace("tempMCC", "fdBMC") + "d 2\nk 1 3\ntrials 4\n";
        let c = parse_config(&text).unwrap();
        assert_eq!(c.d, Some(2));
        assert_eq!(c.k, vec![1, 3]);
        assert_eq!(c.trials, 4);
    }
}
