use std::collections::BTreeSet;

use gptdim_core::composition::{
    amplify, find_isomorphism, isomorphic, maximal_tensor_gbits, parity_project, project_system, steering_check,
    NsBox, Relabeling, DEFAULT_VERTEX_CAP,
};
use gptdim_core::dimensions::{dimension_report, DimensionOptions};
use gptdim_core::io::SystemFile;
use gptdim_core::lp::is_redundant_vertex;
use gptdim_core::{make_classical, make_gbit, make_hypercube, GptSystem, Rational, State, SystemShape};
use proptest::prelude::*;

/// Table index of `P(a1 a2 | x1 x2)`.
fn at(x1: usize, x2: usize, a1: usize, a2: usize) -> usize {
    (x1 << 1 | x2) * 4 + (a1 << 1 | a2)
}

/// The 24 boxes written out from their closed forms: 16 products of
/// one-bit functions and 8 uniform boxes with a nonzero `x1 x2` term.
fn expected_tables() -> BTreeSet<Vec<Rational>> {
    let mut out = BTreeSet::new();
    let functions = |f: usize, x: usize| (f >> x) & 1;
    for f1 in 0..4 {
        for f2 in 0..4 {
            let mut t = vec![Rational::zero(); 16];
            for x1 in 0..2 {
                for x2 in 0..2 {
                    t[at(x1, x2, functions(f1, x1), functions(f2, x2))] = Rational::one();
                }
            }
            out.insert(t);
        }
    }
    for affine in 0..8usize {
        let (b, g, d) = (affine >> 2 & 1, affine >> 1 & 1, affine & 1);
        let mut t = vec![Rational::zero(); 16];
        for x1 in 0..2 {
            for x2 in 0..2 {
                let parity = (x1 * x2) ^ (b * x1) ^ (g * x2) ^ d;
                for a1 in 0..2 {
                    t[at(x1, x2, a1, a1 ^ parity)] = Rational::new(1, 2);
                }
            }
        }
        out.insert(t);
    }
    out
}

#[test]
fn tensor_product_matches_closed_form() {
    let boxes = maximal_tensor_gbits().unwrap();
    let found: BTreeSet<Vec<Rational>> = boxes.iter().map(|b| b.table().to_vec()).collect();
    assert_eq!(found.len(), 24);
    assert_eq!(found, expected_tables());
    let tables: Vec<&[Rational]> = boxes.iter().map(|b| b.table()).collect();
    assert!(tables.windows(2).all(|w| w[0] < w[1]), "canonical order");
}

#[test]
fn tensor_vertices_are_extreme_no_signaling_and_steer_validly() {
    let boxes = maximal_tensor_gbits().unwrap();
    let states: Vec<State> = boxes.iter().map(NsBox::to_state).collect();
    let gbit = make_gbit();
    for (i, b) in boxes.iter().enumerate() {
        NsBox::new(2, b.table().to_vec()).unwrap();
        let others: Vec<State> = states.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s.clone()).collect();
        assert!(!is_redundant_vertex(&states[i], &others).unwrap(), "vertex {i}");
        assert!(steering_check(b, &gbit).unwrap(), "vertex {i}");
    }
    for b in boxes.iter().filter(|b| b.has_uniform_marginals()) {
        let f = b.parity_function().unwrap();
        // The x1 x2 coefficient of the parity is 1.
        assert!(f[0] ^ f[1] ^ f[2] ^ f[3]);
        for party in 0..2 {
            for s in [false, true] {
                assert_eq!(b.marginal(party, s, false), Rational::new(1, 2));
            }
        }
    }
}

#[test]
fn mixture_of_vertices_fails_extremality() {
    let boxes = maximal_tensor_gbits().unwrap();
    let states: Vec<State> = boxes.iter().map(NsBox::to_state).collect();
    let mixed = gptdim_core::mix(&states[..2], &[Rational::new(1, 2), Rational::new(1, 2)]).unwrap();
    assert!(is_redundant_vertex(&mixed, &states).unwrap());
}

#[test]
fn projection_is_the_four_setting_hypercube() {
    let boxes = maximal_tensor_gbits().unwrap();
    for b in &boxes {
        assert!(parity_project(b).is_deterministic());
    }
    let projected = project_system("projection", &boxes).unwrap();
    assert_eq!(projected.vertex_count(), 16);
    assert!(projected.all_deterministic());
    let h4 = make_hypercube(4).unwrap();
    assert!(isomorphic(&projected, &h4));
    let a2 = amplify(2, DEFAULT_VERTEX_CAP).unwrap();
    assert!(isomorphic(&a2, &projected));
    let r = dimension_report(&projected, &DimensionOptions::exhaustive()).unwrap();
    assert_eq!((r.d_m, r.d_i, r.d_m_exact), (2, 16, true));
}

#[test]
fn amplify_three_gbits() {
    let a3 = amplify(3, DEFAULT_VERTEX_CAP).unwrap();
    assert_eq!(a3.vertex_count(), 256);
    assert_eq!(a3.shape().setting_count(), 8);
    assert_eq!(a3.vertices(), make_hypercube(8).unwrap().vertices());
}

#[test]
fn gbit_and_four_outcome_classical_differ() {
    assert!(!isomorphic(&make_gbit(), &make_classical(4).unwrap()));
    assert!(isomorphic(&make_gbit(), &make_hypercube(2).unwrap()));
    assert!(!isomorphic(&make_hypercube(3).unwrap(), &make_hypercube(4).unwrap()));
}

#[test]
fn box_files_roundtrip() {
    let boxes = maximal_tensor_gbits().unwrap();
    let file = SystemFile::from_boxes("boxes", &boxes).unwrap();
    let back = SystemFile::parse(&file.to_json()).unwrap().to_boxes().unwrap();
    assert_eq!(back, boxes);
}

fn relabeled(sys: &GptSystem, settings: &[usize], flips: &[bool]) -> GptSystem {
    let r = Relabeling {
        settings: settings.to_vec(),
        outcomes: flips.iter().map(|&f| if f { vec![1, 0] } else { vec![0, 1] }).collect(),
    };
    let vs = sys.vertices().iter().map(|v| r.apply(v, sys.shape()).unwrap()).collect();
    GptSystem::new("relabeled", sys.shape().clone(), vs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn relabeled_subsystems_are_isomorphic(
        d in 2usize..=4,
        mask in any::<u16>(),
        perm_seed in any::<u64>(),
        flips in prop::collection::vec(any::<bool>(), 4),
    ) {
        let h = make_hypercube(d).unwrap();
        let chosen: Vec<State> = h
            .vertices()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> (i % 16) & 1 == 1)
            .map(|(_, v)| v.clone())
            .collect();
        prop_assume!(!chosen.is_empty());
        let sys = GptSystem::new("subset", SystemShape::binary(d).unwrap(), chosen).unwrap();
        let mut settings: Vec<usize> = (0..d).collect();
        let mut s = perm_seed;
        for i in (1..d).rev() {
            settings.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let other = relabeled(&sys, &settings, &flips[..d]);
        let found = find_isomorphism(&sys, &other).unwrap();
        for v in sys.vertices() {
            prop_assert!(other.vertices().contains(&found.apply(v, other.shape()).unwrap()));
        }
    }

    #[test]
    fn parity_of_products_is_xor(f1 in 0usize..4, f2 in 0usize..4) {
        use gptdim_core::composition::local_deterministic;
        use gptdim_core::GbitLabel;
        let label = |f: usize| GbitLabel { alpha: (f & 1) != ((f >> 1) & 1), beta: f & 1 == 1 };
        let (l1, l2) = (label(f1), label(f2));
        let b = local_deterministic(l1, l2);
        let parity = b.parity_function().unwrap();
        for (x, &px) in parity.iter().enumerate() {
            let expected = ((f1 >> (x >> 1)) & 1) ^ ((f2 >> (x & 1)) & 1) == 1;
            prop_assert_eq!(px, expected);
        }
    }
}
