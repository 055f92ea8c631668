//! Exact dense linear algebra: row reduction, particular solutions, kernels
//! and affine charts of point sets.

use crate::rational::{dot, Rational};

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot column of each nonzero row.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let nz: Vec<usize> = (0..cols).filter(|&j| !m[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut m[r]);
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        m[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut copy = m.to_vec();
    rref(&mut copy).len()
}

/// One solution of `a x = b` (free variables set to zero), if consistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// Basis of `{x : a x = 0}`.
pub fn kernel(a: &[Vec<Rational>], n: usize) -> Matrix {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -&m[r][f];
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, if nonsingular.
pub fn invert(a: &[Vec<Rational>]) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Affine coordinates of a point set relative to an affinely independent
/// subset (the basis).
///
/// Points are lifted to `(p, 1)`; a basis is grown greedily from a preferred
/// list, then in index order. Every point `p_v` satisfies
/// `p_v = sum_b lambda[v][b] p_b` with `sum_b lambda[v][b] = 1`.
#[derive(Debug, Clone)]
pub struct AffineChart {
    pub basis: Vec<usize>,
    /// Lifted coordinates on which the basis points are independent.
    coordinates: Vec<usize>,
    /// Inverse of the basis restricted to `coordinates` (rows: basis points).
    inverse: Matrix,
    pub lambda: Vec<Vec<Rational>>,
    lifted_len: usize,
}

impl AffineChart {
    pub fn new(points: &[&[Rational]], preferred: &[usize]) -> Self {
        let lifted_len = points.first().map_or(0, |p| p.len()) + 1;
        let lift = |p: &[Rational]| {
            let mut v = p.to_vec();
            v.push(Rational::one());
            v
        };
        // Incremental echelon: (reduced vector, pivot coordinate).
        let mut echelon: Vec<(Vec<Rational>, usize)> = Vec::new();
        let mut basis = Vec::new();
        let order = preferred
            .iter()
            .copied()
            .chain((0..points.len()).filter(|i| !preferred.contains(i)));
        for i in order {
            if echelon.len() == lifted_len {
                break;
            }
            let mut v = lift(points[i]);
            for (row, pc) in &echelon {
                if v[*pc].is_zero() {
                    continue;
                }
                let f = v[*pc].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
            if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
                let inv = v[pc].recip();
                for x in v.iter_mut() {
                    *x *= &inv;
                }
                echelon.push((v, pc));
                basis.push(i);
            }
        }
        let coordinates: Vec<usize> = echelon.iter().map(|(_, pc)| *pc).collect();
        let square: Matrix = basis
            .iter()
            .map(|&b| {
                let l = lift(points[b]);
                coordinates.iter().map(|&c| l[c].clone()).collect()
            })
            .collect();
        let inverse = invert(&square).expect("echelon pivots give a nonsingular block");
        let mut chart = AffineChart {
            basis,
            coordinates,
            inverse,
            lambda: Vec::new(),
            lifted_len,
        };
        chart.lambda = points.iter().map(|p| chart.coordinates_of(p)).collect();
        chart
    }

    /// Affine dimension plus one.
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// `lambda` with `lambda^T B = p` restricted to the chart coordinates.
    pub fn coordinates_of(&self, p: &[Rational]) -> Vec<Rational> {
        let k = self.basis.len();
        let restricted: Vec<Rational> = self
            .coordinates
            .iter()
            .map(|&c| {
                if c + 1 == self.lifted_len {
                    Rational::one()
                } else {
                    p[c].clone()
                }
            })
            .collect();
        (0..k)
            .map(|b| {
                let col: Vec<Rational> = (0..k).map(|j| self.inverse[j][b].clone()).collect();
                dot(&restricted, &col)
            })
            .collect()
    }

    /// An affine functional `(coefficients, offset)` taking `values[b]` at
    /// basis point `b`.
    pub fn functional(&self, values: &[Rational]) -> (Vec<Rational>, Rational) {
        let k = self.basis.len();
        // B w = values  ->  w = B^{-1} values
        let w: Vec<Rational> = (0..k).map(|j| dot(&self.inverse[j], values)).collect();
        let mut coefficients = vec![Rational::zero(); self.lifted_len - 1];
        let mut offset = Rational::zero();
        for (&c, wj) in self.coordinates.iter().zip(w) {
            if c + 1 == self.lifted_len {
                offset = wj;
            } else {
                coefficients[c] = wj;
            }
        }
        (coefficients, offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn solve_and_kernel() {
        let a = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        let x = solve(&a, &[q(2), q(3)]).unwrap();
        assert_eq!(dot(&a[0], &x), q(2));
        assert_eq!(dot(&a[1], &x), q(3));
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(a.iter().all(|row| dot(row, &k[0]).is_zero()));
        assert!(solve(&[vec![q(1)], vec![q(1)]], &[q(0), q(1)]).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = invert(&a).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert!(invert(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn chart_of_square() {
        let pts: Vec<Vec<Rational>> = vec![
            vec![q(0), q(0)],
            vec![q(1), q(0)],
            vec![q(1), q(1)],
            vec![q(0), q(1)],
        ];
        let refs: Vec<&[Rational]> = pts.iter().map(|p| p.as_slice()).collect();
        let chart = AffineChart::new(&refs, &[2, 3]);
        assert_eq!(chart.basis, vec![2, 3, 0]);
        for (p, lam) in pts.iter().zip(&chart.lambda) {
            assert!(lam.iter().sum::<Rational>().is_one());
            for c in 0..2 {
                let v: Rational = chart
                    .basis
                    .iter()
                    .zip(lam)
                    .map(|(&b, l)| l * &pts[b][c])
                    .sum();
                assert_eq!(v, p[c]);
            }
        }
        let values = vec![q(1), q(0), q(0)];
        let (coef, off) = chart.functional(&values);
        for (b, val) in chart.basis.iter().zip(&values) {
            assert_eq!(&(&off + dot(&coef, &pts[*b])), val);
        }
    }
}
