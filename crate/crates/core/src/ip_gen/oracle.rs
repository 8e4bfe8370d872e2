use crate::optimize::OptimizeError;
use crate::scalar::Scalar;

use super::{parse_x_name, parse_y_name, IpError, IpModel, ObjectiveSense, Sense, VarKind};

/// Largest number of `y` variables [`enumerate_optimum`] will enumerate.
pub const ORACLE_Y_LIMIT: usize = 20;

/// Optimum of a generated model by brute force over the `y` variables,
/// without touching the dynamics engine.
///
/// For each `y` the adoption variables are raised greedily in time order:
/// every update row only bounds `x<i>_<t>` from above by earlier variables,
/// so the pointwise largest `x` is feasible whenever any `x` is and it
/// maximizes every objective and final row. `q` is set to the cheapest
/// value the budget row allows. Returns `None` when no `y` is feasible.
pub fn enumerate_optimum<T: Scalar>(model: &IpModel<T>) -> Result<Option<T>, IpError> {
    let ys: Vec<usize> = (0..model.variables.len()).filter(|&v| parse_y_name(&model.variables[v].name).is_some()).collect();
    if ys.len() > ORACLE_Y_LIMIT {
        return Err(OptimizeError::TooLarge { nodes: ys.len(), cap: ORACLE_Y_LIMIT }.into());
    }
    let mut xs: Vec<(usize, usize)> = model
        .variables
        .iter()
        .enumerate()
        .filter_map(|(v, var)| parse_x_name(&var.name).map(|(_, t)| (t, v)))
        .collect();
    xs.sort();
    let q = model.index_of("q");

    // Rows whose positive term bounds an x from above.
    let mut rows_by_head: Vec<Vec<usize>> = vec![Vec::new(); model.variables.len()];
    for (r, row) in model.constraints.iter().enumerate() {
        if row.sense != Sense::Le {
            continue;
        }
        for (c, v) in &row.terms {
            if *c > T::zero() && parse_x_name(&model.variables[*v].name).is_some() {
                rows_by_head[*v].push(r);
            }
        }
    }
    let row_ok = |r: usize, values: &[T]| {
        let row = &model.constraints[r];
        let lhs = row.terms.iter().fold(T::zero(), |acc, (c, v)| acc + c.clone() * values[*v].clone());
        lhs <= row.rhs
    };

    let mut best: Option<T> = None;
    for mask in 0u64..(1u64 << ys.len()) {
        let mut values = vec![T::zero(); model.variables.len()];
        for (bit, &v) in ys.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                values[v] = T::one();
            }
        }
        if let Some(q) = q {
            let budget = model.constraints.iter().find(|c| c.name == "budget");
            let spend = budget.map_or_else(T::zero, |row| {
                row.terms.iter().filter(|(_, v)| *v != q).fold(T::zero(), |acc, (c, v)| acc + c.clone() * values[*v].clone())
            });
            values[q] = match model.variables[q].kind {
                VarKind::Continuous => spend,
                _ => spend.ceil_count().map_or(spend, |c| T::from_count(c as usize)),
            };
        }
        for &(_, x) in &xs {
            values[x] = T::one();
            if !rows_by_head[x].iter().all(|&r| row_ok(r, &values)) {
                values[x] = T::zero();
            }
        }
        if model.first_violation(&values).is_some() {
            continue;
        }
        let value = model.objective_value(&values);
        let better = match (&best, model.objective.sense) {
            (None, _) => true,
            (Some(b), ObjectiveSense::Minimize) => value < *b,
            (Some(b), ObjectiveSense::Maximize) => value > *b,
        };
        if better {
            best = Some(value);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_star, Graph, ThresholdProfile};
    use crate::ip_gen::{build_fd_bmc, build_fd_mcc, build_temp_bmc, build_temp_mcc};
    use crate::scalar::Rational;

    #[test]
    fn small_models() {
        let g = Graph::path(4).unwrap();
        let th = ThresholdProfile::uniform(&g, Rational::new(1, 2)).unwrap();
        let one = [Rational::from_integer(1); 4];
        assert_eq!(enumerate_optimum(&build_temp_mcc(&g, &th, &one).unwrap()).unwrap(), Some(Rational::from_integer(1)));
        assert_eq!(enumerate_optimum(&build_temp_bmc(&g, &th, 0).unwrap()).unwrap(), Some(Rational::from_integer(0)));

        let (star, sth) = gen_star(3, Rational::new(1, 2)).unwrap();
        let m = build_fd_bmc(&star, &sth, 1, 1).unwrap();
        assert_eq!(enumerate_optimum(&m).unwrap(), Some(Rational::new(2, 1)));
        let fractional = [Rational::new(1, 2); 4];
        let m = build_fd_mcc(&star, &sth, 1, &fractional).unwrap();
        assert!(enumerate_optimum(&m).unwrap().is_some());
    }
}
