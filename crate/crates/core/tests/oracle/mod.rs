//! Independent reference computations for the integration tests. Nothing in
//! here calls the solver, the linear-algebra helpers or the chart code of the
//! library; only the `Rational` type and the LP data structures are shared.

#![allow(dead_code, clippy::needless_range_loop)]

use gptdim_core::lp::{LpProblem, Relation};
use gptdim_core::{make_gbit, GptSystem, Rational, State};

/// `row . x` against a right-hand side.
type Row = (Vec<Rational>, Rational);

/// Half-width of the box used to bound feasible regions with lines.
pub const BOX: i64 = 1000;

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Gauss-Jordan on a square system; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for k in 0..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let t = &f * &a[col][k];
                    a[r][k] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Drops equality rows implied by earlier ones; `None` if they contradict.
fn independent_equalities(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut kept: Vec<Row> = Vec::new();
    // Reduced copies of the kept rows with their pivot columns.
    let mut reduced: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
    for (row, rhs) in rows {
        let (mut r, mut b) = (row.clone(), rhs.clone());
        for (p, pr, pb) in &reduced {
            if !r[*p].is_zero() {
                let f = &r[*p] / &pr[*p];
                for (x, y) in r.iter_mut().zip(pr) {
                    *x -= &f * y;
                }
                b -= &f * pb;
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                reduced.push((p, r, b));
                kept.push((row, rhs));
            }
            None if b.is_zero() => {}
            None => return None,
        }
    }
    Some(kept)
}

/// Equalities and `row . x >= rhs` inequalities, the latter including the
/// box `-bound <= x_i <= bound`.
fn split(lp: &LpProblem, bound: i64) -> (Vec<Row>, Vec<Row>) {
    let mut eq = Vec::new();
    let mut ge = Vec::new();
    for c in &lp.constraints {
        let neg: Vec<Rational> = c.coefficients.iter().map(|a| -a.clone()).collect();
        match c.relation {
            Relation::Ge => ge.push((c.coefficients.clone(), c.rhs.clone())),
            Relation::Le => ge.push((neg, -c.rhs.clone())),
            Relation::Eq => eq.push((c.coefficients.clone(), c.rhs.clone())),
        }
    }
    for i in 0..lp.variable_count {
        let mut up = vec![q(0); lp.variable_count];
        up[i] = q(-1);
        ge.push((up, q(-bound)));
        let mut down = vec![q(0); lp.variable_count];
        down[i] = q(1);
        ge.push((down, q(-bound)));
    }
    (eq, ge)
}

/// All vertices of the feasible region cut down to the box of half-width
/// `bound`: every independent equality is tight, and every choice of the
/// remaining tight inequalities is solved as a square system.
pub fn boxed_vertices(lp: &LpProblem, bound: i64) -> Vec<Vec<Rational>> {
    let n = lp.variable_count;
    let (eq, ge) = split(lp, bound);
    let Some(eq) = independent_equalities(eq) else {
        return Vec::new();
    };
    if eq.len() > n {
        return Vec::new();
    }
    let mut found: Vec<Vec<Rational>> = Vec::new();
    for subset in choose(ge.len(), n - eq.len()) {
        let rows = eq.iter().chain(subset.iter().map(|&k| &ge[k]));
        let (a, b): (Vec<_>, Vec<_>) = rows.map(|(r, b)| (r.clone(), b.clone())).unzip();
        if let Some(x) = solve_square(a, b) {
            let ok = eq.iter().all(|(r, b)| dot(r, &x) == *b) && ge.iter().all(|(r, b)| dot(r, &x) >= *b);
            if ok && !found.contains(&x) {
                found.push(x);
            }
        }
    }
    found
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Infeasible,
    /// Bounded optimum (or feasible, when there is no objective).
    Optimal(Option<Rational>),
    Unbounded,
}

fn boxed_max(lp: &LpProblem, obj: &[Rational], bound: i64) -> Rational {
    boxed_vertices(lp, bound).iter().map(|v| dot(obj, v)).max().unwrap()
}

/// Feasibility from the boxed vertices. With an objective, the optimum is
/// bounded iff doubling the box leaves the boxed maximum unchanged.
pub fn oracle(lp: &LpProblem) -> OracleVerdict {
    let vs = boxed_vertices(lp, BOX);
    if vs.is_empty() {
        return OracleVerdict::Infeasible;
    }
    let Some(obj) = &lp.objective else {
        return OracleVerdict::Optimal(None);
    };
    let best = vs.iter().map(|v| dot(obj, v)).max().unwrap();
    if boxed_max(lp, obj, 2 * BOX) == best {
        OracleVerdict::Optimal(Some(best))
    } else {
        OracleVerdict::Unbounded
    }
}

/// Point sets drawn from the g-bit: every subset of at least two vertices,
/// each alone and with a mixed point added (an edge midpoint, and the
/// centre for the full square).
pub fn gbit_point_sets() -> Vec<GptSystem> {
    let g = make_gbit();
    let shape = g.shape().clone();
    let v = g.vertices();
    let half = Rational::new(1, 2);
    let mid = |a: &State, b: &State| {
        gptdim_core::mix(&[a.clone(), b.clone()], &[half.clone(), half.clone()]).unwrap()
    };
    let mut out = Vec::new();
    for mask in 1u32..16 {
        let pts: Vec<State> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| v[i].clone()).collect();
        if pts.len() < 2 {
            continue;
        }
        out.push(GptSystem::from_hull_points(format!("gbit-{mask:04b}"), shape.clone(), pts.clone()).unwrap());
        let mut with_mid = pts.clone();
        with_mid.push(mid(&pts[0], &pts[1]));
        out.push(GptSystem::from_hull_points(format!("gbit-{mask:04b}+mid"), shape.clone(), with_mid).unwrap());
        if pts.len() == 4 {
            let mut with_center = pts.clone();
            with_center.push(State::maximally_mixed(&shape));
            out.push(GptSystem::from_hull_points(format!("gbit-{mask:04b}+center"), shape.clone(), with_center).unwrap());
        }
    }
    out
}

/// Whether reading a single setting already gives every state of `subset`
/// a different outcome. A lower bound on perfect discrimination for
/// deterministic systems, and exact for one-setting systems.
pub fn classical_readout_distinguishes(sys: &GptSystem, subset: &[usize]) -> bool {
    let shape = sys.shape();
    (0..shape.setting_count()).any(|x| {
        let mut outcomes: Vec<usize> = subset
            .iter()
            .map(|&i| sys.vertex(i).distribution(x).iter().position(|p| p.is_one()).unwrap())
            .collect();
        let n = outcomes.len();
        outcomes.sort_unstable();
        outcomes.dedup();
        outcomes.len() == n
    })
}

/// Pairwise-distinguishability LPs of every g-bit point set: the chart form
/// and the plain coefficient form, each with no objective and with a few
/// fixed objectives. Only problems with 2 to 4 variables are kept.
pub fn gbit_lp_family() -> Vec<(String, LpProblem)> {
    use gptdim_core::dimensions::{pairwise_lp, pairwise_lp_coefficients};
    let mut out = Vec::new();
    for sys in gbit_point_sets() {
        let n = sys.vertex_count();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (chart, _) = pairwise_lp(&sys, i, j).unwrap();
                let coeff = pairwise_lp_coefficients(&sys, i, j, false).unwrap();
                for (form, lp) in [("chart", chart), ("coefficients", coeff)] {
                    let m = lp.variable_count;
                    if !(2..=4).contains(&m) {
                        continue;
                    }
                    let ones = vec![q(1); m];
                    let alternating: Vec<Rational> =
                        (0..m).map(|k| q(if k % 2 == 0 { 1 } else { -2 })).collect();
                    let mut first = vec![q(0); m];
                    first[0] = q(-1);
                    let tag = format!("{}[{i},{j}] {form}", sys.name());
                    out.push((tag.clone(), lp.clone()));
                    for (o, obj) in [("ones", ones), ("alternating", alternating), ("first", first)] {
                        out.push((format!("{tag} max {o}"), lp.clone().maximize(obj)));
                    }
                }
            }
        }
    }
    out
}
