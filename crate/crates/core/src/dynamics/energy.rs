use crate::graph::{Graph, ThresholdProfile};
use crate::nodeset::{AdoptionState, NodeSet};
use crate::scalar::Rational;

use super::{check_len, step_raw, DynamicsError};

/// `E(x) = <b', x> - <A x - b', x'>` with `b' = b - 1/2`: sightings needed to
/// hold `x` minus sightings wasted on `x'`. Works on the half-integer grid.
pub fn energy<T>(
    graph: &Graph,
    thresholds: &ThresholdProfile<T>,
    state: &AdoptionState,
    next: &AdoptionState,
) -> Result<Rational, DynamicsError> {
    check_len(graph, state)?;
    check_len(graph, next)?;
    if step_raw(graph, thresholds.b(), state, None) != *next {
        return Err(DynamicsError::NotUnforcedSuccessor);
    }
    Ok(energy_raw(graph, thresholds.b(), state, next))
}

pub(crate) fn energy_raw(graph: &Graph, b: &[usize], state: &NodeSet, next: &NodeSet) -> Rational {
    // doubled to stay in integers: 2E = sum (2b - 1) x - sum (2 Ax - 2b + 1) x'
    let needed: i64 = state.iter().map(|i| 2 * b[i] as i64 - 1).sum();
    let wasted: i64 = next
        .iter()
        .map(|i| {
            let seen = graph.neighbor_set(i).intersection_count(state) as i64;
            2 * seen - 2 * b[i] as i64 + 1
        })
        .sum();
    Rational::new(needed - wasted, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_star;

    #[test]
    fn star_two_cycle_has_constant_energy() {
        let (g, th) = gen_star(4, Rational::new(1, 2)).unwrap();
        let hub = NodeSet::from_indices(5, [0]);
        let leaves = NodeSet::from_indices(5, 1..5);
        let e0 = energy(&g, &th, &hub, &leaves).unwrap();
        let e1 = energy(&g, &th, &leaves, &hub).unwrap();
        assert_eq!(e0, Rational::new(-1, 2));
        assert_eq!(e0, e1);
    }

    #[test]
    fn brute_force_sighting_count() {
        // recount the star value by walking edges one sighting at a time
        let (g, th) = gen_star(4, Rational::new(1, 2)).unwrap();
        let hub = NodeSet::from_indices(5, [0]);
        let leaves = NodeSet::from_indices(5, 1..5);
        let mut needed = Rational::from_integer(0);
        let mut wasted = Rational::from_integer(0);
        for i in 0..5 {
            let bi = Rational::from_integer(th.b()[i] as i64) - Rational::new(1, 2);
            if hub.contains(i) {
                needed += bi;
            }
            if leaves.contains(i) {
                let mut sightings = Rational::from_integer(0);
                for &j in g.neighbors(i) {
                    if hub.contains(j) {
                        sightings += 1;
                    }
                }
                wasted += sightings - bi;
            }
        }
        assert_eq!(energy(&g, &th, &hub, &leaves).unwrap(), needed - wasted);
    }

    #[test]
    fn all_brown_is_zero_and_forced_successor_rejected() {
        let (g, th) = gen_star(4, Rational::new(1, 2)).unwrap();
        let empty = NodeSet::empty(5);
        assert_eq!(energy(&g, &th, &empty, &empty).unwrap(), Rational::from_integer(0));
        let hub = NodeSet::from_indices(5, [0]);
        assert_eq!(energy(&g, &th, &hub, &hub), Err(DynamicsError::NotUnforcedSuccessor));
    }
}
