//! Exact two-phase simplex over rationals.
//!
//! Dense tableau, Bland's rule for both entering and leaving variables, so
//! every run terminates and identical problems produce identical witnesses.
//! Variables are free unless constrained; a trivial presolve turns
//! single-variable equalities into fixed values and `x >= 0` rows into sign
//! restrictions, every other free variable is split into `x+ - x-`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::system::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint {
            coefficients,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        crate::rational::dot(&self.coefficients, x)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(x), &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub variable_count: usize,
    pub constraints: Vec<LinearConstraint>,
    /// Maximized when present.
    pub objective: Option<Vec<Rational>>,
}

impl LpProblem {
    pub fn new(variable_count: usize) -> Self {
        LpProblem {
            variable_count,
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn add(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints
            .push(LinearConstraint::new(coefficients, relation, rhs));
    }

    /// Adds `sum coeff * x_var (relation) rhs`, leaving other coefficients zero.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut c = vec![Rational::zero(); self.variable_count];
        for (v, a) in terms {
            c[*v] += a;
        }
        self.add(c, relation, rhs);
    }

    pub fn maximize(mut self, objective: Vec<Rational>) -> Self {
        self.objective = Some(objective);
        self
    }

    fn validate(&self) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.variable_count {
                return Err(Error::LpDimension(format!(
                    "constraint {i} has {} coefficients for {} variables",
                    c.coefficients.len(),
                    self.variable_count
                )));
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.variable_count {
                return Err(Error::LpDimension(format!(
                    "objective has {} coefficients for {} variables",
                    obj.len(),
                    self.variable_count
                )));
            }
        }
        Ok(())
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variable_count && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// A feasible point (optimal when an objective was given and bounded).
    pub witness: Option<Vec<Rational>>,
    /// Objective optimum when feasible; the phase-1 infeasibility when infeasible.
    pub optimum: Option<Rational>,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }

    fn infeasible(measure: Rational) -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            witness: None,
            optimum: Some(measure),
        }
    }
}

struct Reduced {
    /// Original variable -> fixed value.
    fixed: Vec<Option<Rational>>,
    nonnegative: Vec<bool>,
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

fn presolve(problem: &LpProblem) -> std::result::Result<Reduced, Rational> {
    let n = problem.variable_count;
    let mut fixed: Vec<Option<Rational>> = vec![None; n];
    let mut active = vec![true; problem.constraints.len()];

    let residual = |c: &LinearConstraint, fixed: &[Option<Rational>]| -> Rational {
        let mut rhs = c.rhs.clone();
        for (a, f) in c.coefficients.iter().zip(fixed) {
            if let Some(v) = f {
                if !a.is_zero() {
                    rhs -= a * v;
                }
            }
        }
        rhs
    };

    loop {
        let mut changed = false;
        for (ci, c) in problem.constraints.iter().enumerate() {
            if !active[ci] || c.relation != Relation::Eq {
                continue;
            }
            let mut free = c
                .coefficients
                .iter()
                .enumerate()
                .filter(|(v, a)| !a.is_zero() && fixed[*v].is_none());
            let (Some((v, a)), None) = (free.next(), free.next()) else {
                continue;
            };
            let value = residual(c, &fixed) / a;
            fixed[v] = Some(value);
            active[ci] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let mut nonnegative = vec![false; n];
    let mut rows = Vec::new();
    for (ci, c) in problem.constraints.iter().enumerate() {
        if !active[ci] {
            continue;
        }
        let rhs = residual(c, &fixed);
        let coeffs: Vec<Rational> = c
            .coefficients
            .iter()
            .zip(&fixed)
            .map(|(a, f)| if f.is_some() { Rational::zero() } else { a.clone() })
            .collect();
        let nz: Vec<usize> = (0..n).filter(|&v| !coeffs[v].is_zero()).collect();
        match nz.as_slice() {
            [] => {
                let zero = Rational::zero();
                if !c.relation.holds(&zero, &rhs) {
                    return Err(rhs.abs());
                }
            }
            [v] if rhs.is_zero()
                && ((coeffs[*v].is_positive() && c.relation == Relation::Ge)
                    || (coeffs[*v].is_negative() && c.relation == Relation::Le)) =>
            {
                nonnegative[*v] = true;
            }
            _ => rows.push((coeffs, c.relation, rhs)),
        }
    }
    Ok(Reduced {
        fixed,
        nonnegative,
        rows,
    })
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; last entry is the objective value.
    objective: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns at or beyond this index are artificial.
    artificial_start: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.objective.len()
    }

    fn rhs(&self) -> usize {
        self.width() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        let rhs = self.rhs();
        for j in 0..=rhs {
            if !self.rows[r][j].is_zero() {
                self.rows[r][j] *= &inv;
            }
        }
        let nz: Vec<usize> = (0..=rhs).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &nz {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.objective[c].is_zero() {
            let factor = self.objective[c].clone();
            for &j in &nz {
                self.objective[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland pivots until optimal (`true`) or unbounded (`false`).
    fn optimize(&mut self, column_limit: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(enter) = (0..column_limit).find(|&j| self.objective[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn set_objective(&mut self, costs: &[Rational]) {
        let rhs = self.rhs();
        let mut obj: Vec<Rational> = (0..=rhs)
            .map(|j| if j < costs.len() { -&costs[j] } else { Rational::zero() })
            .collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = costs.get(self.basis[i]).cloned().unwrap_or_else(Rational::zero);
            if cb.is_zero() {
                continue;
            }
            for j in 0..=rhs {
                if !row[j].is_zero() {
                    obj[j] += &cb * &row[j];
                }
            }
        }
        self.objective = obj;
    }

    fn column_values(&self, count: usize) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); count];
        let rhs = self.rhs();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < count {
                values[b] = self.rows[i][rhs].clone();
            }
        }
        values
    }
}

/// Solves `problem` exactly. Without an objective the result is a phase-1
/// feasibility verdict and witness.
pub fn solve(problem: &LpProblem) -> Result<LpOutcome> {
    problem.validate()?;
    let reduced = match presolve(problem) {
        Ok(r) => r,
        Err(measure) => return Ok(LpOutcome::infeasible(measure)),
    };
    let n = problem.variable_count;

    // Structural columns.
    let mut pos_col = vec![usize::MAX; n];
    let mut neg_col = vec![usize::MAX; n];
    let mut structural = 0;
    for v in 0..n {
        if reduced.fixed[v].is_some() {
            continue;
        }
        pos_col[v] = structural;
        structural += 1;
        if !reduced.nonnegative[v] {
            neg_col[v] = structural;
            structural += 1;
        }
    }
    let slack_count = reduced
        .rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let m = reduced.rows.len();

    // Decide which rows start with a slack in the basis.
    let mut needs_artificial = Vec::with_capacity(m);
    for (_, rel, rhs) in &reduced.rows {
        let flip = rhs.is_negative();
        let slack_positive = match rel {
            Relation::Le => !flip,
            Relation::Ge => flip,
            Relation::Eq => false,
        };
        needs_artificial.push(!slack_positive);
    }
    let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
    let artificial_start = structural + slack_count;
    let width = artificial_start + artificial_count + 1;
    let rhs_col = width - 1;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = structural;
    let mut art = artificial_start;
    for (ri, (coeffs, rel, rhs)) in reduced.rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for v in 0..n {
            let a = &coeffs[v];
            if a.is_zero() {
                continue;
            }
            row[pos_col[v]] = a.clone();
            if neg_col[v] != usize::MAX {
                row[neg_col[v]] = -a;
            }
        }
        let mut slack_col = None;
        match rel {
            Relation::Le => {
                row[slack] = Rational::one();
                slack_col = Some(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Rational::one();
                slack_col = Some(slack);
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[rhs_col] = rhs.clone();
        if rhs.is_negative() {
            for x in row.iter_mut() {
                if !x.is_zero() {
                    *x = -&*x;
                }
            }
        }
        if needs_artificial[ri] {
            row[art] = Rational::one();
            basis.push(art);
            art += 1;
        } else {
            basis.push(slack_col.unwrap());
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        objective: vec![Rational::zero(); width],
        basis,
        artificial_start,
    };

    // Phase 1: maximize -(sum of artificials).
    if artificial_count > 0 {
        let mut costs = vec![Rational::zero(); width - 1];
        for c in costs.iter_mut().skip(artificial_start) {
            *c = -Rational::one();
        }
        t.set_objective(&costs);
        t.optimize(width - 1);
        let value = t.objective[t.rhs()].clone();
        if value.is_negative() {
            return Ok(LpOutcome::infeasible(-value));
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= t.artificial_start {
                match (0..t.artificial_start).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(j) => t.pivot(r, j),
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in t.rows.iter_mut() {
            let rhs = row[rhs_col].clone();
            row.truncate(artificial_start);
            row.push(rhs);
        }
        t.objective = vec![Rational::zero(); artificial_start + 1];
    }

    let mut status = LpStatus::Feasible;
    if let Some(obj) = &problem.objective {
        let mut costs = vec![Rational::zero(); artificial_start];
        for v in 0..n {
            if reduced.fixed[v].is_some() {
                continue;
            }
            costs[pos_col[v]] = obj[v].clone();
            if neg_col[v] != usize::MAX {
                costs[neg_col[v]] = -&obj[v];
            }
        }
        t.set_objective(&costs);
        if !t.optimize(artificial_start) {
            status = LpStatus::Unbounded;
        }
    }

    let cols = t.column_values(structural);
    let witness: Vec<Rational> = (0..n)
        .map(|v| match &reduced.fixed[v] {
            Some(f) => f.clone(),
            None => {
                let p = &cols[pos_col[v]];
                if neg_col[v] == usize::MAX {
                    p.clone()
                } else {
                    p - &cols[neg_col[v]]
                }
            }
        })
        .collect();
    if !problem.is_satisfied_by(&witness) {
        return Err(Error::Invariant("simplex witness fails its own constraints".into()));
    }
    let optimum = match (&problem.objective, status) {
        (Some(obj), LpStatus::Feasible) => Some(crate::rational::dot(obj, &witness)),
        _ => None,
    };
    Ok(LpOutcome {
        status,
        witness: Some(witness),
        optimum,
    })
}

/// Convex weights `w >= 0, sum w = 1` with `sum w_k points_k = target`, if any.
pub fn convex_weights(target: &State, points: &[State]) -> Result<Option<Vec<Rational>>> {
    let k = points.len();
    let len = target.table().len();
    for p in points {
        if p.shape() != target.shape() {
            return Err(Error::ShapeMismatch {
                expected: target.shape().to_string(),
                found: p.shape().to_string(),
            });
        }
    }
    let mut lp = LpProblem::new(k);
    for w in 0..k {
        lp.add_sparse(&[(w, Rational::one())], Relation::Ge, Rational::zero());
    }
    lp.add(vec![Rational::one(); k], Relation::Eq, Rational::one());
    for c in 0..len {
        let coeffs = points.iter().map(|p| p.table()[c].clone()).collect();
        lp.add(coeffs, Relation::Eq, target.table()[c].clone());
    }
    let out = solve(&lp)?;
    Ok(if out.is_feasible() { out.witness } else { None })
}

/// True iff `candidate` is a convex combination of `others`.
pub fn is_redundant_vertex(candidate: &State, others: &[State]) -> Result<bool> {
    if others.is_empty() {
        return Err(Error::InvalidArgument("need at least one other state".into()));
    }
    Ok(convex_weights(candidate, others)?.is_some())
}
