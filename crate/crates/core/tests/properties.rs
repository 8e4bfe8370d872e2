mod common;

use common::*;
use greenspread::dynamics::{check_monotonicity, energy, limit, run, SubsidySchedule};
use greenspread::graph::{derive_thresholds, format_graph, gen_rewired_clusters, parse_graph, Graph, RewireMode, ThresholdProfile};
use greenspread::ip_gen::{build_model, decode_and_verify, enumerate_optimum, export_lp, parse_lp, IpSolution, LpMode};
use greenspread::optimize::{solve_exact, PlanningProblem, SolveOptions, Variant};
use greenspread::{NodeSet, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    graph: Graph,
    thresholds: ThresholdProfile<Rational>,
    rng: ChaCha8Rng,
}

fn instance(n: usize, p: f64, seed: u64, wide: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_graph(&mut rng, n, p);
    let b = if wide { random_counts_wide(&mut rng, &graph) } else { random_counts(&mut rng, &graph) };
    let thresholds = ThresholdProfile::from_counts(&graph, b).unwrap();
    Instance { graph, thresholds, rng }
}

fn schedule(rng: &mut ChaCha8Rng, set: NodeSet) -> SubsidySchedule {
    match rng.gen_range(0..3) {
        0 => SubsidySchedule::temporary(set),
        1 => SubsidySchedule::fixed_duration(set, rng.gen_range(1..5)).unwrap(),
        _ => SubsidySchedule::indefinite(set),
    }
}

fn problem(inst: &mut Instance, variant: Variant) -> (PlanningProblem<Rational>, usize, usize, Vec<Rational>) {
    let n = inst.graph.node_count();
    let d = inst.rng.gen_range(1..4);
    let k = inst.rng.gen_range(0..=n.min(3));
    let costs: Vec<Rational> = if inst.rng.gen_bool(0.3) {
        (0..n).map(|_| Rational::new(inst.rng.gen_range(1..5), inst.rng.gen_range(1..3))).collect()
    } else {
        vec![Rational::from_integer(1); n]
    };
    let mut p = PlanningProblem::new(variant, inst.graph.clone(), inst.thresholds.clone(), d, k).unwrap();
    if variant.is_mcc() {
        p = p.with_costs(costs.clone()).unwrap();
    }
    (p, d, k, costs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn thresholds_are_monotone_in_alpha(n in 1usize..12, p in 0.0f64..1.0, seed: u64, a in 0i64..=60, extra in 0i64..=60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, p);
        let lo = ThresholdProfile::uniform(&g, Rational::new(a, 60)).unwrap();
        let hi = ThresholdProfile::uniform(&g, Rational::new(a + extra, 60)).unwrap();
        let float = ThresholdProfile::uniform(&g, a as f64 / 60.0).unwrap();
        for i in 0..n {
            prop_assert!(lo.b()[i] <= hi.b()[i]);
            let scaled = Rational::new(a * g.degree(i) as i64, 60);
            let b = Rational::from_integer(lo.b()[i] as i64);
            prop_assert!(b - Rational::from_integer(1) < scaled && scaled <= b);
            prop_assert_eq!(float.b()[i], lo.b()[i]);
        }
    }

    #[test]
    fn rewiring_keeps_the_edge_count(clusters in 1usize..6, size in 3usize..8, p in 0.0f64..=1.0, seed: u64) {
        let g = gen_rewired_clusters(clusters, size, p, seed, RewireMode::Resample).unwrap();
        prop_assert_eq!(g.node_count(), clusters * size);
        prop_assert_eq!(g.edge_count(), clusters * size * (size - 1) / 2);
        let again = gen_rewired_clusters(clusters, size, p, seed, RewireMode::Resample).unwrap();
        prop_assert_eq!(g.edges(), again.edges());
        let dropped = gen_rewired_clusters(clusters, size, p, seed, RewireMode::DropDuplicates).unwrap();
        prop_assert!(dropped.edge_count() <= g.edge_count());
    }

    #[test]
    fn graph_text_round_trips(n in 1usize..12, p in 0.0f64..1.0, seed: u64) {
        let inst = instance(n, p, seed, true);
        let text = format_graph(&inst.graph, &inst.thresholds);
        let (g, th) = parse_graph::<Rational>(&text).unwrap();
        prop_assert_eq!(g.edges(), inst.graph.edges());
        prop_assert_eq!(th.b(), inst.thresholds.b());
        prop_assert_eq!(format_graph(&g, &th), text);
    }

    #[test]
    fn convergence_within_bounds(n in 1usize..12, p in 0.1f64..0.8, seed: u64) {
        let mut inst = instance(n, p, seed, false);
        let (g, th) = (&inst.graph, &inst.thresholds);
        let e = g.edge_count();
        let s = to_set(&random_set(&mut inst.rng, n, 0.3));

        let (_, temp) = run(g, th, &SubsidySchedule::temporary(s.clone())).unwrap();
        prop_assert_eq!(temp.cycle.len(), 1);
        prop_assert!(temp.transient <= 2 * n);

        let d = inst.rng.gen_range(1..6);
        let (traj, fd) = run(g, th, &SubsidySchedule::fixed_duration(s.clone(), d).unwrap()).unwrap();
        prop_assert!(fd.cycle.len() <= 2);
        prop_assert!(fd.transient < d + 2 * e + n, "transient {} with d={} |E|={} |V|={}", fd.transient, d, e, n);

        let (_, cycle) = simulate(g, th.b(), &to_flags(&s), Forcing::Steps(d));
        let mut expected: Vec<NodeSet> = cycle.iter().map(|c| to_set(c)).collect();
        expected.sort();
        let mut got = fd.cycle.clone();
        got.sort();
        prop_assert_eq!(got, expected);
        prop_assert!(traj.states.len() > fd.transient);
    }

    #[test]
    fn energy_drops_by_half_before_the_cycle(n in 1usize..12, p in 0.1f64..0.8, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        let (g, th) = (&inst.graph, &inst.thresholds);
        let s = to_set(&random_set(&mut inst.rng, n, 0.3));
        let d = inst.rng.gen_range(1..6);
        for sched in [SubsidySchedule::temporary(s.clone()), SubsidySchedule::fixed_duration(s, d).unwrap()] {
            let (traj, report) = run(g, th, &sched).unwrap();
            let start = report.energy_start.unwrap();
            let trace = &report.energy_trace;
            for (k, pair) in trace.windows(2).enumerate() {
                let t = start + k;
                let recomputed = energy(g, th, &traj.states[t], &traj.states[t + 1]).unwrap();
                prop_assert_eq!(recomputed, pair[0]);
                if traj.states[t + 2] != traj.states[t] {
                    prop_assert!(pair[1] - pair[0] <= Rational::new(-1, 2));
                } else {
                    prop_assert_eq!(pair[1], pair[0]);
                }
            }
            if let (Some(lo), Some(hi)) = (trace.iter().min(), trace.iter().max()) {
                prop_assert!(*hi - *lo <= Rational::from_integer(2 * g.edge_count() as i64));
            }
        }
    }

    #[test]
    fn containment_is_preserved(n in 1usize..12, p in 0.1f64..0.8, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        let a = random_set(&mut inst.rng, n, 0.3);
        let extra = random_set(&mut inst.rng, n, 0.3);
        let b: Vec<bool> = a.iter().zip(&extra).map(|(x, y)| *x || *y).collect();
        let s = to_set(&random_set(&mut inst.rng, n, 0.2));
        let sched = schedule(&mut inst.rng, s);
        prop_assert!(check_monotonicity(&inst.graph, &inst.thresholds, &to_set(&a), &to_set(&b), &sched).unwrap());
    }

    #[test]
    fn larger_subsidies_adopt_more(n in 1usize..12, p in 0.1f64..0.8, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        let small = random_set(&mut inst.rng, n, 0.2);
        let extra = random_set(&mut inst.rng, n, 0.2);
        let large: Vec<bool> = small.iter().zip(&extra).map(|(x, y)| *x || *y).collect();
        let d = inst.rng.gen_range(1..5);
        for forcing in [Forcing::UntilNoGrowth, Forcing::Steps(d)] {
            let (ts, _) = simulate(&inst.graph, inst.thresholds.b(), &small, forcing);
            let (tl, _) = simulate(&inst.graph, inst.thresholds.b(), &large, forcing);
            // compare at a common late time, extending each run periodically
            let horizon = d + 2 * inst.graph.edge_count() + 3 * n + 4;
            let at = |t: &Vec<State>, k: usize| {
                let last = t.len() - 1;
                let first = t.iter().position(|s| *s == t[last]).unwrap();
                let period = last - first;
                if k <= last { t[k].clone() } else { t[first + (k - first) % period.max(1)].clone() }
            };
            for k in [horizon, horizon + 1] {
                let (xs, xl) = (at(&ts, k), at(&tl, k));
                prop_assert!((0..n).all(|i| !xs[i] || xl[i]));
            }
        }
        let ls = limit(&inst.graph, &inst.thresholds, &SubsidySchedule::temporary(to_set(&small))).unwrap();
        let ll = limit(&inst.graph, &inst.thresholds, &SubsidySchedule::temporary(to_set(&large))).unwrap();
        prop_assert!(ls.cycle[0].is_subset(&ll.cycle[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_search_matches_enumeration(n in 1usize..9, p in 0.1f64..0.7, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        for variant in Variant::ALL {
            let (problem, d, k, costs) = problem(&mut inst, variant);
            let expected = brute_force(variant, &inst.graph, &inst.thresholds, d, k, &costs);
            match solve_exact(&problem, &SolveOptions::default()) {
                Ok(res) => {
                    let value = if variant.is_mcc() { res.objective } else { res.objective * Rational::from_integer(n as i64) };
                    prop_assert_eq!(Some(value), expected, "{}", variant);
                    prop_assert!(res.optimal);
                }
                Err(e) => prop_assert!(expected.is_none(), "{} failed with {:?}, expected {:?}", variant, e, expected),
            }
        }
    }

    #[test]
    fn ip_optimum_matches_enumeration(n in 1usize..8, p in 0.1f64..0.6, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        for variant in Variant::ALL {
            let (problem, d, k, costs) = problem(&mut inst, variant);
            let model = build_model(&problem).unwrap();
            let expected = brute_force(variant, &inst.graph, &inst.thresholds, d, k, &costs);
            prop_assert_eq!(enumerate_optimum(&model).unwrap(), expected, "{}", variant);
        }
    }

    #[test]
    fn feasible_assignments_never_overstate(n in 1usize..8, p in 0.1f64..0.6, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        let variant = if inst.rng.gen_bool(0.5) { Variant::TempBmc } else { Variant::FdBmc };
        let (problem, _, k, _) = problem(&mut inst, variant);
        let model = build_model(&problem).unwrap();
        // choose y within budget, then raise x in time order where allowed, randomly lagging
        let mut chosen = 0;
        let mut values = vec![Rational::from_integer(0); model.variables.len()];
        for (v, var) in model.variables.iter().enumerate() {
            if var.name.starts_with('y') && chosen < k && inst.rng.gen_bool(0.4) {
                values[v] = Rational::from_integer(1);
                chosen += 1;
            }
        }
        let mut xs: Vec<(usize, usize)> = model.variables.iter().enumerate().filter_map(|(v, var)| {
            let (_, t) = var.name.strip_prefix('x')?.split_once('_')?;
            Some((t.parse::<usize>().ok()?, v))
        }).collect();
        xs.sort();
        for (_, v) in xs {
            if inst.rng.gen_bool(0.8) {
                values[v] = Rational::from_integer(1);
                if model.first_violation(&values).is_some() {
                    values[v] = Rational::from_integer(0);
                }
            }
        }
        prop_assert!(model.first_violation(&values).is_none());
        let solution = IpSolution {
            values: model.variables.iter().zip(&values).map(|(var, v)| (var.name.clone(), *v)).collect(),
            objective: None,
        };
        let report = decode_and_verify(&model, &solution, &inst.graph, &inst.thresholds).unwrap();
        prop_assert!(report.lag_audit);
        prop_assert!(report.simulated_adoption * Rational::from_integer(n as i64) >= report.objective);
    }

    #[test]
    fn scaled_export_preserves_verdicts(n in 1usize..7, p in 0.1f64..0.7, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        let variant = Variant::ALL[inst.rng.gen_range(0..4)];
        let (problem, _, _, _) = problem(&mut inst, variant);
        let model = build_model(&problem).unwrap();
        let text = export_lp(&model, LpMode::Scaled).unwrap();
        prop_assert_eq!(&text, &export_lp(&model, LpMode::Scaled).unwrap());
        let in_rows = text.split("Subject To").nth(1).unwrap().split("\nGenerals").next().unwrap().split("\nBinaries").next().unwrap();
        prop_assert!(!in_rows.contains('.'), "scaled rows contain a decimal point");
        let parsed = parse_lp::<Rational>(&text).unwrap();
        prop_assert_eq!(parsed.variables.len(), model.variables.len());
        for _ in 0..20 {
            let values: Vec<Rational> = model.variables.iter().map(|v| {
                if v.name == "q" { Rational::from_integer(inst.rng.gen_range(0..=n as i64)) } else { Rational::from_integer(inst.rng.gen_range(0..=1)) }
            }).collect();
            prop_assert_eq!(model.first_violation(&values).is_none(), parsed.first_violation(&values).is_none());
        }
    }

    #[test]
    fn model_size_formulas(n in 1usize..10, p in 0.1f64..0.7, seed: u64) {
        let mut inst = instance(n, p, seed, true);
        let e = inst.graph.edge_count();
        for variant in Variant::ALL {
            let (problem, d, _, _) = problem(&mut inst, variant);
            let model = build_model(&problem).unwrap();
            let horizon = if variant.is_fd() { d + 2 * e + n } else { 2 * n };
            let q = usize::from(variant.is_mcc());
            prop_assert_eq!(model.variables.len(), q + n + n * (horizon + 1));
            let finals = if variant.is_mcc() {
                problem.target().count() * if variant.is_fd() { 2 } else { 1 }
            } else {
                0
            };
            prop_assert_eq!(model.constraints.len(), 1 + n * (horizon + 1) + finals);
        }
    }
}

#[test]
fn float_and_rational_thresholds_agree_on_sixths() {
    let g = gen_rewired_clusters(5, 6, 0.3, 1, RewireMode::Resample).unwrap();
    for k in 0..=6 {
        let exact = ThresholdProfile::uniform(&g, Rational::new(k, 6)).unwrap();
        let float = derive_thresholds(&g, vec![k as f64 / 6.0; 30]).unwrap();
        assert_eq!(exact.b(), float.b());
    }
}
