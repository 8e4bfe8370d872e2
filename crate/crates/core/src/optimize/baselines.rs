use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::limit;
use crate::nodeset::NodeSet;
use crate::scalar::{Rational, Scalar};

use super::{certify, OptimizeError, PlanResult, PlanningProblem};

/// Long-term adoption of a batch of subsidy sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineSummary {
    pub sets: Vec<NodeSet>,
    pub values: Vec<Rational>,
    pub mean: Rational,
    pub min: Rational,
    pub max: Rational,
}

impl BaselineSummary {
    fn from_sets<T: Scalar>(problem: &PlanningProblem<T>, sets: Vec<NodeSet>) -> Result<Self, OptimizeError> {
        let n = problem.graph().node_count();
        let values = sets
            .iter()
            .map(|s| Ok(limit(problem.graph(), problem.thresholds(), &problem.schedule(s.clone()))?.adoption(n)))
            .collect::<Result<Vec<_>, OptimizeError>>()?;
        let total: Rational = values.iter().sum();
        let mean = total / Rational::from_integer(values.len() as i64);
        let min = values.iter().min().copied().unwrap_or_default();
        let max = values.iter().max().copied().unwrap_or_default();
        Ok(BaselineSummary { sets, values, mean, min, max })
    }
}

/// Repeatedly adds the node with the best marginal long-term adoption, up to
/// `k` nodes; ties go to the lowest index.
pub fn greedy<T: Scalar>(problem: &PlanningProblem<T>) -> Result<PlanResult<T>, OptimizeError> {
    let Some(k) = problem.budget() else {
        return Err(OptimizeError::VariantMismatch("greedy"));
    };
    let graph = problem.graph();
    let n = graph.node_count();
    let b = problem.thresholds().b();
    let mut chosen = NodeSet::empty(n);
    let mut explored = 0u64;
    for _ in 0..k {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..n).filter(|&v| b[v] > 0 && !chosen.contains(v)) {
            let mut trial = chosen.clone();
            trial.insert(v);
            let value = limit(graph, problem.thresholds(), &problem.schedule(trial))?.double_count();
            explored += 1;
            if best.is_none_or(|(_, bv)| value > bv) {
                best = Some((v, value));
            }
        }
        match best {
            Some((v, _)) => chosen.insert(v),
            None => break,
        }
    }
    certify(problem, chosen, false, explored)
}

/// `trials` uniformly drawn subsets of `set_size` nodes, reproducible from
/// `seed` (ChaCha8).
pub fn random_baseline<T: Scalar>(
    problem: &PlanningProblem<T>,
    set_size: usize,
    trials: usize,
    seed: u64,
) -> Result<BaselineSummary, OptimizeError> {
    let n = problem.graph().node_count();
    if set_size > n {
        return Err(OptimizeError::InvalidProblem(format!("set size {set_size} exceeds {n} nodes")));
    }
    if trials == 0 {
        return Err(OptimizeError::InvalidProblem("at least one trial required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..trials).map(|_| NodeSet::from_indices(n, sample(&mut rng, n, set_size))).collect();
    BaselineSummary::from_sets(problem, sets)
}

/// Every subset of exactly `set_size` nodes, in lexicographic order.
pub fn exhaustive_baseline<T: Scalar>(
    problem: &PlanningProblem<T>,
    set_size: usize,
) -> Result<BaselineSummary, OptimizeError> {
    let n = problem.graph().node_count();
    if set_size > n {
        return Err(OptimizeError::InvalidProblem(format!("set size {set_size} exceeds {n} nodes")));
    }
    let mut sets = Vec::new();
    let mut combo: Vec<usize> = (0..set_size).collect();
    loop {
        sets.push(NodeSet::from_indices(n, combo.iter().copied()));
        let Some(i) = (0..set_size).rev().find(|&i| combo[i] < n - set_size + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..set_size {
            combo[j] = combo[j - 1] + 1;
        }
    }
    BaselineSummary::from_sets(problem, sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_class1, gen_class2};

    #[test]
    fn class1_has_three_perfect_singletons() {
        let (g, th) = gen_class1::<Rational>(10).unwrap();
        let p = PlanningProblem::temp_mcc(g, th).unwrap();
        let all = exhaustive_baseline(&p, 1).unwrap();
        assert_eq!(all.sets.len(), 21);
        let perfect: Vec<usize> = all
            .values
            .iter()
            .zip(&all.sets)
            .filter(|(v, _)| **v == Rational::from_integer(1))
            .map(|(_, s)| s.to_vec()[0])
            .collect();
        assert_eq!(perfect, vec![0, 1, 2]);
    }

    #[test]
    fn random_draws_are_reproducible() {
        let (g, th) = gen_class2::<Rational>(4).unwrap();
        let p = PlanningProblem::temp_bmc(g, th, 2).unwrap();
        let a = random_baseline(&p, 2, 5, 11).unwrap();
        let b = random_baseline(&p, 2, 5, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.sets.iter().all(|s| s.count() == 2));
        assert!(a.min <= a.mean && a.mean <= a.max);
        assert!(random_baseline(&p, 12, 1, 0).is_err());
    }

    #[test]
    fn greedy_with_zero_budget_and_mcc_rejection() {
        let (g, th) = gen_class2::<Rational>(2).unwrap();
        let p = PlanningProblem::temp_bmc(g.clone(), th.clone(), 0).unwrap();
        let res = greedy(&p).unwrap();
        assert!(res.subsidy_set.is_empty());
        assert_eq!(res.objective, Rational::from_integer(0));
        assert!(!res.optimal);
        let mcc = PlanningProblem::temp_mcc(g, th).unwrap();
        assert_eq!(greedy(&mcc), Err(OptimizeError::VariantMismatch("greedy")));
    }
}
