//! Vertex enumeration of `{x : E x = e, A x >= b}` by exhaustive tight-set
//! enumeration: the equalities are solved once to parameterise the affine
//! hull, then every choice of `dim` inequalities with a nonsingular tight
//! system yields a candidate point, kept if it satisfies everything.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::linalg;
use crate::rational::{dot, Rational};

/// `coefficients . x (= or >=) rhs`
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

impl Halfspace {
    pub fn new(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Halfspace { coefficients, rhs }
    }
}

/// All vertices, sorted lexicographically. Returns an empty list when the
/// polytope is empty or has no vertex (contains a line).
pub fn enumerate_vertices(
    variables: usize,
    equalities: &[Halfspace],
    inequalities: &[Halfspace],
) -> Vec<Vec<Rational>> {
    let eq_rows: Vec<Vec<Rational>> = equalities.iter().map(|h| h.coefficients.clone()).collect();
    let eq_rhs: Vec<Rational> = equalities.iter().map(|h| h.rhs.clone()).collect();
    let base = if equalities.is_empty() {
        vec![Rational::zero(); variables]
    } else {
        match linalg::solve(&eq_rows, &eq_rhs) {
            Some(x) => x,
            None => return Vec::new(),
        }
    };
    let directions = linalg::kernel(&eq_rows, variables);
    let dim = directions.len();

    // Inequalities in hull coordinates z: reduced[k] . z >= shifted[k].
    let reduced: Vec<Vec<Rational>> = inequalities
        .iter()
        .map(|h| directions.iter().map(|d| dot(&h.coefficients, d)).collect())
        .collect();
    let shifted: Vec<Rational> = inequalities
        .iter()
        .map(|h| &h.rhs - dot(&h.coefficients, &base))
        .collect();

    let lift = |z: &[Rational]| -> Vec<Rational> {
        let mut x = base.clone();
        for (zt, d) in z.iter().zip(&directions) {
            if zt.is_zero() {
                continue;
            }
            for (xi, di) in x.iter_mut().zip(d) {
                if !di.is_zero() {
                    *xi += zt * di;
                }
            }
        }
        x
    };
    let feasible = |z: &[Rational]| {
        reduced
            .iter()
            .zip(&shifted)
            .all(|(row, rhs)| dot(row, z) >= *rhs)
    };

    if dim == 0 {
        return if feasible(&[]) { vec![base] } else { Vec::new() };
    }

    let subsets: Vec<Vec<usize>> = (0..inequalities.len()).combinations(dim).collect();
    let found: BTreeSet<Vec<Rational>> = subsets
        .par_iter()
        .filter_map(|subset| {
            let a: Vec<Vec<Rational>> = subset.iter().map(|&k| reduced[k].clone()).collect();
            let inv = linalg::invert(&a)?;
            let b: Vec<Rational> = subset.iter().map(|&k| shifted[k].clone()).collect();
            let z: Vec<Rational> = inv.iter().map(|row| dot(row, &b)).collect();
            feasible(&z).then(|| lift(&z))
        })
        .collect();
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn unit_square() {
        let ineq = vec![
            Halfspace::new(vec![q(1), q(0)], q(0)),
            Halfspace::new(vec![q(0), q(1)], q(0)),
            Halfspace::new(vec![q(-1), q(0)], q(-1)),
            Halfspace::new(vec![q(0), q(-1)], q(-1)),
        ];
        let v = enumerate_vertices(2, &[], &ineq);
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn simplex_in_affine_hull() {
        // x + y + z = 1, x, y, z >= 0
        let eq = vec![Halfspace::new(vec![q(1), q(1), q(1)], q(1))];
        let ineq = (0..3)
            .map(|i| {
                let mut c = vec![q(0); 3];
                c[i] = q(1);
                Halfspace::new(c, q(0))
            })
            .collect::<Vec<_>>();
        let v = enumerate_vertices(3, &eq, &ineq);
        assert_eq!(v, vec![vec![q(0), q(0), q(1)], vec![q(0), q(1), q(0)], vec![q(1), q(0), q(0)]]);
    }

    #[test]
    fn empty_and_point() {
        let eq = vec![
            Halfspace::new(vec![q(1)], q(1)),
            Halfspace::new(vec![q(1)], q(2)),
        ];
        assert!(enumerate_vertices(1, &eq, &[]).is_empty());
        let eq = vec![Halfspace::new(vec![q(1)], q(1))];
        assert_eq!(enumerate_vertices(1, &eq, &[]), vec![vec![q(1)]]);
    }
}
