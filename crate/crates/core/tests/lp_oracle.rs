mod oracle;

use gptdim_core::lp::{self, LpProblem, LpStatus, Relation};
use gptdim_core::Rational;
use oracle::{gbit_lp_family, oracle, OracleVerdict};
use proptest::prelude::*;

fn check_against_oracle(name: &str, problem: &LpProblem) {
    let out = lp::solve(problem).unwrap();
    let expected = oracle(problem);
    match (&expected, out.status) {
        (OracleVerdict::Infeasible, LpStatus::Infeasible) => {
            assert!(out.witness.is_none(), "{name}");
            assert!(out.optimum.as_ref().is_some_and(|m| m.is_positive()), "{name}");
        }
        (OracleVerdict::Optimal(best), LpStatus::Feasible) => {
            let w = out.witness.as_ref().unwrap();
            assert!(problem.is_satisfied_by(w), "{name}: witness fails substitution");
            if let (Some(best), Some(obj)) = (best, &problem.objective) {
                let value: Rational = obj.iter().zip(w).map(|(c, x)| c * x).sum();
                assert_eq!(&value, best, "{name}: optimum");
                assert_eq!(out.optimum.as_ref(), Some(best), "{name}");
            }
        }
        (OracleVerdict::Unbounded, LpStatus::Unbounded) => {
            assert!(problem.is_satisfied_by(out.witness.as_ref().unwrap()), "{name}");
        }
        (e, s) => panic!("{name}: oracle says {e:?}, simplex says {s:?}"),
    }
}

#[test]
fn gbit_family_matches_vertex_enumeration() {
    let family = gbit_lp_family();
    assert!(family.len() > 100);
    let mut infeasible = 0;
    for (name, problem) in &family {
        check_against_oracle(name, problem);
        if oracle(problem) == OracleVerdict::Infeasible {
            infeasible += 1;
        }
    }
    // Mixed points cannot be perfectly separated, so the family has both kinds.
    assert!(infeasible > 0 && infeasible < family.len());
}

fn small_lp() -> impl Strategy<Value = LpProblem> {
    (2usize..=3).prop_flat_map(|n| {
        let row = prop::collection::vec(-3i64..=3, n);
        let constraint = (row, 0u8..3, -4i64..=4);
        (
            prop::collection::vec(constraint, 1..6),
            prop::option::of(prop::collection::vec(-3i64..=3, n)),
        )
            .prop_map(move |(cs, obj)| {
                let mut lp = LpProblem::new(n);
                for (r, rel, rhs) in cs {
                    let rel = [Relation::Le, Relation::Eq, Relation::Ge][rel as usize];
                    lp.add(r.into_iter().map(Rational::from_integer).collect(), rel, Rational::from_integer(rhs));
                }
                match obj {
                    Some(o) => lp.maximize(o.into_iter().map(Rational::from_integer).collect()),
                    None => lp,
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_small_lps_match_oracle(problem in small_lp()) {
        check_against_oracle("random", &problem);
    }

    #[test]
    fn solving_is_deterministic(problem in small_lp()) {
        prop_assert_eq!(lp::solve(&problem).unwrap(), lp::solve(&problem).unwrap());
    }
}
