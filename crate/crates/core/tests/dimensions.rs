mod oracle;

use gptdim_core::dimensions::{
    build_graph_with, dimension_report, pairwise_lp_coefficients, perfect_measurement, DimensionOptions, Route,
};
use gptdim_core::{make_classical, make_gbit, make_hypercube, GptSystem, Rational, State, SystemShape};
use oracle::{classical_readout_distinguishes, oracle, OracleVerdict};
use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Largest subset with a perfectly discriminating measurement, searching
/// every subset from the top down.
fn brute_force_dm(sys: &GptSystem) -> usize {
    let n = sys.vertex_count();
    (2..=n)
        .rev()
        .find(|&k| subsets(n, k).iter().any(|s| perfect_measurement(sys, s).unwrap().is_some()))
        .unwrap_or(1)
}

fn random_deterministic_system(rng: &mut ChaCha8Rng, tag: usize) -> GptSystem {
    let settings = rng.gen_range(1..=3);
    let arities: Vec<usize> = (0..settings).map(|_| rng.gen_range(2..=3)).collect();
    let shape = SystemShape::new(arities.clone()).unwrap();
    let total: usize = arities.iter().product();
    let mut labels: Vec<Vec<usize>> = (0..total)
        .map(|mut code| {
            arities
                .iter()
                .rev()
                .map(|&a| {
                    let o = code % a;
                    code /= a;
                    o
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect()
        })
        .collect();
    labels.shuffle(rng);
    let count = rng.gen_range(2..=total.min(8));
    let vertices = labels[..count]
        .iter()
        .map(|l| State::deterministic(&shape, l).unwrap())
        .collect();
    GptSystem::new(format!("random-{tag}"), shape, vertices).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, shape: &SystemShape) -> State {
    let mut table = Vec::new();
    for &a in shape.arities() {
        let weights: Vec<i64> = loop {
            let w: Vec<i64> = (0..a).map(|_| rng.gen_range(0..=3)).collect();
            if w.iter().sum::<i64>() > 0 {
                break w;
            }
        };
        let total: i64 = weights.iter().sum();
        table.extend(weights.into_iter().map(|w| Rational::new(w, total)));
    }
    State::new(shape.clone(), table).unwrap()
}

#[test]
fn classical_systems_have_equal_dimensions() {
    for d in 2..=6 {
        let sys = make_classical(d).unwrap();
        let r = dimension_report(&sys, &DimensionOptions::exhaustive()).unwrap();
        r.verify(&sys).unwrap();
        assert_eq!((r.d_m, r.d_i), (d, d));
        assert!(r.d_m_exact);
        let all: Vec<usize> = (0..d).collect();
        assert!(classical_readout_distinguishes(&sys, &all));
        if d <= 5 {
            assert_eq!(brute_force_dm(&sys), d);
        }
    }
}

#[test]
fn gbit_brute_force() {
    let g = make_gbit();
    assert_eq!(brute_force_dm(&g), 2);
    for s in subsets(4, 3) {
        assert!(perfect_measurement(&g, &s).unwrap().is_none(), "{s:?}");
    }
    let r = dimension_report(&g, &DimensionOptions::exhaustive()).unwrap();
    assert_eq!((r.d_m, r.d_i), (2, 4));
}

#[test]
fn hypercube_dimensions_certified() {
    for d in 2..=4 {
        let sys = make_hypercube(d).unwrap();
        let r = dimension_report(&sys, &DimensionOptions::exhaustive()).unwrap();
        r.verify(&sys).unwrap();
        assert_eq!(r.d_i, 1 << d);
        assert_eq!(r.d_m, 2);
        assert!(r.d_m_exact);
    }
}

#[test]
fn random_deterministic_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for t in 0..50 {
        let sys = random_deterministic_system(&mut rng, t);
        let r = dimension_report(&sys, &DimensionOptions::exhaustive()).unwrap();
        r.verify(&sys).unwrap();
        assert!(r.d_m <= r.d_i, "{}", sys.name());
        // Distinct deterministic tables always differ at some setting.
        assert_eq!(r.d_i, sys.vertex_count());
        let n = sys.vertex_count();
        let readout = (2..=n)
            .rev()
            .find(|&k| subsets(n, k).iter().any(|s| classical_readout_distinguishes(&sys, s)))
            .unwrap_or(1);
        assert!(r.d_m >= readout, "{}", sys.name());
        if n <= 6 {
            assert_eq!(r.d_m, brute_force_dm(&sys), "{}", sys.name());
        }
    }
}

#[test]
fn lp_route_matches_coefficient_oracle_on_mixed_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let shapes = [SystemShape::binary(2).unwrap(), SystemShape::new(vec![4]).unwrap(), SystemShape::new(vec![3]).unwrap()];
    let mut checked = 0;
    let mut edges = 0;
    for t in 0..30 {
        let shape = &shapes[t % shapes.len()];
        let count = rng.gen_range(2..=4);
        let mut pts: Vec<State> = Vec::new();
        while pts.len() < count {
            let s = random_state(&mut rng, shape);
            if !pts.contains(&s) {
                pts.push(s);
            }
        }
        let sys = GptSystem::from_hull_points(format!("mixed-{t}"), shape.clone(), pts).unwrap();
        let lp_graph = build_graph_with(&sys, Route::LpOnly).unwrap();
        let auto_graph = build_graph_with(&sys, Route::Auto).unwrap();
        lp_graph.verify(&sys).unwrap();
        assert_eq!(lp_graph.adjacency(), auto_graph.adjacency());
        for i in 0..count {
            for j in 0..count {
                if i == j {
                    continue;
                }
                let lp = pairwise_lp_coefficients(&sys, i, j, false).unwrap();
                let feasible = oracle(&lp) != OracleVerdict::Infeasible;
                assert_eq!(lp_graph.has_edge(i, j), feasible, "{} ({i},{j})", sys.name());
                edges += feasible as usize;
                checked += 1;
            }
        }
    }
    assert!(edges > 0 && edges < checked);
}

#[test]
fn lp_route_matches_on_builders() {
    for sys in [make_gbit(), make_classical(4).unwrap(), make_hypercube(3).unwrap()] {
        let a = build_graph_with(&sys, Route::LpOnly).unwrap();
        let b = build_graph_with(&sys, Route::Auto).unwrap();
        assert_eq!(a.adjacency(), b.adjacency());
        assert_eq!(a.edge_count(), sys.vertex_count() * (sys.vertex_count() - 1) / 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ordering_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_deterministic_system(&mut rng, 0);
        let r = dimension_report(&sys, &DimensionOptions::exhaustive()).unwrap();
        prop_assert!(r.d_m <= r.d_i);
        prop_assert!(r.verify(&sys).is_ok());
    }

    #[test]
    fn witnesses_are_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_deterministic_system(&mut rng, 0);
        let g = build_graph_with(&sys, Route::Auto).unwrap();
        for i in 0..sys.vertex_count() {
            for j in 0..sys.vertex_count() {
                if i != j {
                    let e = g.witness(i, j).unwrap();
                    prop_assert!(e.evaluate(sys.vertex(i)).unwrap().is_one());
                    prop_assert!(e.evaluate(sys.vertex(j)).unwrap().is_zero());
                }
            }
        }
    }
}
