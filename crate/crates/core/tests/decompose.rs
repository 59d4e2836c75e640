use proptest::prelude::*;
use rand::Rng;

use qubo_decomp::cutset::{choose_cut, min_vertex_cut, CutStrategy};
use qubo_decomp::decompose::{decompose, lift_solution, DecompConfig};
use qubo_decomp::generate::generate_connected;
use qubo_decomp::instance::Instance;
use qubo_decomp::qubo::{maxcut_to_qubo, Restriction};
use qubo_decomp::reweight::{build_rows, ReweightMode};
use qubo_decomp::rng;
use qubo_decomp::subsolver::{build_table, exact_optimum, s_bits, BackendChoice};
use qubo_decomp::{QuboInstance, WeightedGraph};

/// Smallest vertex subset whose removal leaves at least two components.
fn brute_force_connectivity(g: &WeightedGraph) -> Option<usize> {
    let n = g.n();
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) || size + 2 > n {
            continue;
        }
        let removed: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if g.components_avoiding(&removed).len() >= 2 {
            best = Some(size);
        }
    }
    best
}

fn random_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
    generate_connected(n, p, 1, 5, seed).unwrap()
}

fn random_qubo_on(g: &WeightedGraph, seed: u64) -> QuboInstance {
    let mut r = rng::stream(seed, "test-qubo", 0);
    let mut q = QuboInstance::new(g.n());
    for (u, v, _) in g.edges() {
        q.add_quad(u, v, r.gen_range(-3..=3) as f64).unwrap();
    }
    for i in 0..g.n() {
        q.add_lin(i, r.gen_range(-3..=3) as f64).unwrap();
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn min_cut_is_minimal_and_separates(n in 3usize..11, p in 0.1f64..0.7, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        match min_vertex_cut(&g) {
            Ok(part) => {
                prop_assert!(part.is_valid_for(&g));
                prop_assert_eq!(Some(part.k()), brute_force_connectivity(&g));
                prop_assert!(part.v1.len() >= part.v2.len());
            }
            Err(_) => prop_assert!(g.is_complete()),
        }
    }

    #[test]
    fn neighborhood_cut_separates(n in 3usize..14, p in 0.1f64..0.5, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        if let Ok(part) = choose_cut(&g, CutStrategy::MinDegreeNeighborhood) {
            prop_assert!(part.is_valid_for(&g));
        }
    }

    #[test]
    fn exact_mode_conserves_optimum(n in 4usize..13, p in 0.1f64..0.5, seed in any::<u64>()) {
        let inst = Instance::MaxCut(random_graph(n, p, seed));
        let cfg = DecompConfig { m_cut: 4, ..DecompConfig::default() };
        let trace = decompose(&inst, &cfg).unwrap();
        prop_assert!(trace.all_exact());
        let orig = exact_optimum(&inst.to_qubo()).unwrap().value;
        let fin = exact_optimum(&trace.final_instance.to_qubo()).unwrap();
        prop_assert!((fin.value + trace.c_total - orig).abs() <= 1e-9);
        let z = lift_solution(&trace, &fin.witness).unwrap();
        prop_assert!((inst.evaluate_bits(z.bits()).unwrap() - orig).abs() <= 1e-9);
    }

    #[test]
    fn error_budget_bounds_the_gap(n in 6usize..13, p in 0.3f64..0.8, seed in any::<u64>(), qubo in any::<bool>()) {
        let g = random_graph(n, p, seed);
        let inst = if qubo {
            Instance::Qubo(random_qubo_on(&g, seed))
        } else {
            Instance::MaxCut(g)
        };
        let trace = decompose(&inst, &DecompConfig::default()).unwrap();
        let orig = exact_optimum(&inst.to_qubo()).unwrap().value;
        let fin = exact_optimum(&trace.final_instance.to_qubo()).unwrap().value;
        let gap = (fin + trace.c_total - orig).abs();
        prop_assert!(gap <= trace.error_budget() + 1e-7, "gap {} budget {}", gap, trace.error_budget());
        for it in &trace.iterations {
            prop_assert_eq!(it.reweight.exact, it.reweight.max_error() <= 1e-9);
            prop_assert!(it.reweight.errors.iter().all(|e| e.e >= -1e-12));
        }
    }

    #[test]
    fn progress_is_strict(n in 4usize..16, p in 0.05f64..0.6, seed in any::<u64>()) {
        let inst = Instance::MaxCut(random_graph(n, p, seed));
        let cfg = DecompConfig { cut_strategy: CutStrategy::MinDegreeNeighborhood, ..DecompConfig::default() };
        let trace = decompose(&inst, &cfg).unwrap();
        let mut last = n;
        for it in &trace.iterations {
            prop_assert_eq!(it.vertices_before, last);
            prop_assert!(it.vertices_after < it.vertices_before);
            last = it.vertices_after;
        }
        prop_assert!(trace.iterations.len() <= n);
        prop_assert_eq!(trace.final_n(), last);
    }

    #[test]
    fn maxcut_tables_are_complement_symmetric(n in 5usize..12, p in 0.1f64..0.5, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let Ok(part) = min_vertex_cut(&g) else { return Ok(()) };
        let inst = Instance::MaxCut(g);
        let h = inst.side_terms(&part).unwrap();
        let table = build_table(&h, &part, &BackendChoice::exact(), 0).unwrap();
        let k = part.k();
        prop_assert_eq!(table.rows.len(), 1 << k);
        let totals = table.totals();
        for s in 0..1usize << k {
            prop_assert!((totals[s] - totals[(1 << k) - 1 - s]).abs() <= 1e-9);
            let restricted = h.restrict(&Restriction::from_assignment(&part.cut, &s_bits(s, k)).unwrap()).unwrap();
            let (sub, _) = restricted.sub.induced(&(0..part.v2.len()).map(|i| {
                restricted.free_vars.iter().position(|&v| v == part.v2[i]).unwrap()
            }).collect::<Vec<_>>()).unwrap();
            let best = exact_optimum(&sub).unwrap().value + restricted.constant;
            prop_assert!((totals[s] - best).abs() <= 1e-9);
        }
        let sys = build_rows(&table, ReweightMode::CutForm).unwrap();
        prop_assert_eq!(sys.b.len(), 1 << (k - 1));
    }

    #[test]
    fn fixing_a_cut_separates_the_sides(n in 5usize..12, p in 0.1f64..0.5, seed in any::<u64>(), s in any::<u16>()) {
        let g = random_graph(n, p, seed);
        let Ok(part) = min_vertex_cut(&g) else { return Ok(()) };
        let q = maxcut_to_qubo(&g);
        let k = part.k();
        let r = Restriction::from_assignment(&part.cut, &s_bits(s as usize % (1 << k), k)).unwrap();
        let restricted = q.restrict(&r).unwrap();
        let local = |v: usize| restricted.free_vars.iter().position(|&x| x == v).unwrap();
        let v1: Vec<usize> = part.v1.iter().map(|&v| local(v)).collect();
        let v2: Vec<usize> = part.v2.iter().map(|&v| local(v)).collect();
        for (i, j, _) in restricted.sub.quad_terms() {
            prop_assert!(!(v1.contains(&i) && v2.contains(&j) || v2.contains(&i) && v1.contains(&j)));
        }
        let whole = exact_optimum(&restricted.sub).unwrap().value;
        let c1 = exact_optimum(&restricted.sub.induced(&v1).unwrap().0).unwrap().value;
        let c2 = exact_optimum(&restricted.sub.induced(&v2).unwrap().0).unwrap().value;
        prop_assert!((whole - (c1 + c2)).abs() <= 1e-9);
    }
}
