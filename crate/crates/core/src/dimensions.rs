//! Information dimension (largest pairwise perfectly distinguishable set) and
//! measurement dimension (largest set perfectly distinguished by a single
//! measurement) of a [`GptSystem`].
//!
//! Both reduce to exact LP feasibility. Effects are parameterised by their
//! values on an affine basis of the vertex set, so an LP only carries one
//! unknown per basis point (per outcome), and the equalities `e(w_s) = 1/0`
//! on basis points are absorbed by the LP presolve.
//!
//! Perfect discrimination is downward closed: merging two outcomes of a
//! measurement that discriminates `S` discriminates `S` minus one state. The
//! measurement dimension search therefore runs over clique sizes in
//! increasing order and stops at the first size where every clique is
//! infeasible, which certifies every larger size as well.

use rayon::prelude::*;
use serde::Serialize;

use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::linalg::AffineChart;
use crate::lp::{self, LpProblem, Relation};
use crate::rational::Rational;
use crate::system::{Effect, GptSystem, Measurement};

/// Systems up to this many vertices are certified exhaustively by default.
pub const DEFAULT_EXHAUSTIVE_VERTICES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Try an atomic-effect certificate before falling back to the LP.
    #[default]
    Auto,
    LpOnly,
}

#[derive(Debug, Clone, Default)]
pub struct DimensionOptions {
    /// Largest clique size checked for a single discriminating measurement.
    /// `None` picks full exhaustion for small systems and 2 otherwise.
    pub certify_limit: Option<usize>,
    pub route: Route,
}

impl DimensionOptions {
    pub fn exhaustive() -> Self {
        DimensionOptions {
            certify_limit: Some(usize::MAX),
            route: Route::Auto,
        }
    }

    fn limit_for(&self, sys: &GptSystem) -> usize {
        self.certify_limit.unwrap_or(if sys.vertex_count() <= DEFAULT_EXHAUSTIVE_VERTICES {
            usize::MAX
        } else {
            2
        })
    }
}

fn vertex_tables(sys: &GptSystem) -> Vec<&[Rational]> {
    sys.vertices().iter().map(|v| v.table()).collect()
}

fn check_pair(sys: &GptSystem, i: usize, j: usize) -> Result<()> {
    let n = sys.vertex_count();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: idx,
                limit: n,
            });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument(format!(
            "a state cannot be distinguished from itself (index {i})"
        )));
    }
    Ok(())
}

/// Feasibility LP for a valid effect with `e(w_i) = 1`, `e(w_j) = 0`,
/// parameterised by the effect's values on the returned chart's basis.
pub fn pairwise_lp(sys: &GptSystem, i: usize, j: usize) -> Result<(LpProblem, AffineChart)> {
    check_pair(sys, i, j)?;
    let chart = AffineChart::new(&vertex_tables(sys), &[i, j]);
    let mut lp = LpProblem::new(chart.size());
    lp.add(chart.lambda[i].clone(), Relation::Eq, Rational::one());
    lp.add(chart.lambda[j].clone(), Relation::Eq, Rational::zero());
    for lam in &chart.lambda {
        lp.add(lam.clone(), Relation::Ge, Rational::zero());
        lp.add(lam.clone(), Relation::Le, Rational::one());
    }
    Ok((lp, chart))
}

/// The same question posed directly over effect coefficients (and
/// optionally an offset), one LP variable per table entry.
pub fn pairwise_lp_coefficients(
    sys: &GptSystem,
    i: usize,
    j: usize,
    with_offset: bool,
) -> Result<LpProblem> {
    check_pair(sys, i, j)?;
    let len = sys.shape().table_length();
    let vars = len + with_offset as usize;
    let row = |t: &[Rational]| {
        let mut r = t.to_vec();
        if with_offset {
            r.push(Rational::one());
        }
        r
    };
    let mut lp = LpProblem::new(vars);
    lp.add(row(sys.vertex(i).table()), Relation::Eq, Rational::one());
    lp.add(row(sys.vertex(j).table()), Relation::Eq, Rational::zero());
    for v in sys.vertices() {
        lp.add(row(v.table()), Relation::Ge, Rational::zero());
        lp.add(row(v.table()), Relation::Le, Rational::one());
    }
    Ok(lp)
}

fn atomic_certificate(sys: &GptSystem, i: usize, j: usize) -> Option<Effect> {
    let shape = sys.shape();
    let (a, b) = (sys.vertex(i), sys.vertex(j));
    for x in 0..shape.setting_count() {
        for (o, (pa, pb)) in a.distribution(x).iter().zip(b.distribution(x)).enumerate() {
            if pa.is_one() && pb.is_zero() {
                return Effect::atomic(shape, x, o).ok();
            }
        }
    }
    None
}

/// Witness effect with `e(w_i) = 1`, `e(w_j) = 0`, valid on the whole
/// system, decided by LP.
pub fn pairwise_distinguishable_lp(sys: &GptSystem, i: usize, j: usize) -> Result<Option<Effect>> {
    let (lp, chart) = pairwise_lp(sys, i, j)?;
    let out = lp::solve(&lp)?;
    if !out.is_feasible() {
        return Ok(None);
    }
    let (coefficients, offset) = chart.functional(&out.witness.unwrap());
    Ok(Some(Effect::new(sys.shape().clone(), coefficients, offset)?))
}

pub fn pairwise_distinguishable(sys: &GptSystem, i: usize, j: usize) -> Result<Option<Effect>> {
    pairwise_with(sys, i, j, Route::Auto)
}

fn pairwise_with(sys: &GptSystem, i: usize, j: usize, route: Route) -> Result<Option<Effect>> {
    check_pair(sys, i, j)?;
    if route == Route::Auto {
        if let Some(e) = atomic_certificate(sys, i, j) {
            return Ok(Some(e));
        }
    }
    pairwise_distinguishable_lp(sys, i, j)
}

/// Pairwise perfect distinguishability of the vertices, with one witness
/// effect per edge.
#[derive(Debug, Clone)]
pub struct DistinguishabilityGraph {
    vertex_count: usize,
    /// Upper-triangular, row-major over pairs `i < j`.
    witnesses: Vec<Option<Effect>>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl DistinguishabilityGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.witness(i, j).is_some()
    }

    /// Effect with `e(w_i) = 1` and `e(w_j) = 0`; for `i > j` the complement
    /// of the stored witness.
    pub fn witness(&self, i: usize, j: usize) -> Option<Effect> {
        if i == j {
            return None;
        }
        if i < j {
            self.witnesses[pair_index(self.vertex_count, i, j)].clone()
        } else {
            self.witnesses[pair_index(self.vertex_count, j, i)]
                .as_ref()
                .map(Effect::complement)
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count;
        (0..n)
            .map(|i| (0..n).map(|j| self.has_edge(i, j)).collect())
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.witnesses.iter().filter(|w| w.is_some()).count()
    }

    pub fn to_graph(&self) -> Graph {
        let n = self.vertex_count;
        let mut g = Graph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if self.witnesses[pair_index(n, i, j)].is_some() {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Re-checks every witness by direct evaluation on the system.
    pub fn verify(&self, sys: &GptSystem) -> Result<()> {
        let n = self.vertex_count;
        for i in 0..n {
            for j in i + 1..n {
                if let Some(e) = &self.witnesses[pair_index(n, i, j)] {
                    if !e.evaluate(sys.vertex(i))?.is_one()
                        || !e.evaluate(sys.vertex(j))?.is_zero()
                        || !e.is_valid_for(sys)?
                    {
                        return Err(Error::Invariant(format!(
                            "edge ({i}, {j}) witness does not separate the pair"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn build_graph(sys: &GptSystem) -> Result<DistinguishabilityGraph> {
    build_graph_with(sys, Route::Auto)
}

pub fn build_graph_with(sys: &GptSystem, route: Route) -> Result<DistinguishabilityGraph> {
    let n = sys.vertex_count();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "distinguishability graph needs at least two states".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let witnesses = pairs
        .par_iter()
        .map(|&(i, j)| pairwise_with(sys, i, j, route))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistinguishabilityGraph {
        vertex_count: n,
        witnesses,
    })
}

/// Size of a maximum clique of the distinguishability graph and one such clique.
pub fn information_dimension(graph: &DistinguishabilityGraph) -> (usize, Vec<usize>) {
    let clique = graph.to_graph().maximum_clique();
    (clique.len(), clique)
}

/// Feasibility LP for effects `e_1..e_m` with `e_a(w_s) = delta(a, s)` on
/// `states`, `sum_a e_a = u` on every vertex and `e_a >= 0` on every vertex
/// (upper bounds follow from the last two).
pub fn measurement_lp(sys: &GptSystem, states: &[usize]) -> Result<(LpProblem, AffineChart)> {
    let n = sys.vertex_count();
    if let Some(&s) = states.iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange {
            what: "state",
            index: s,
            limit: n,
        });
    }
    let chart = AffineChart::new(&vertex_tables(sys), states);
    let k = chart.size();
    let m = states.len();
    let var = |a: usize, b: usize| a * k + b;
    let mut lp = LpProblem::new(m * k);
    let effect_row = |a: usize, lam: &[Rational]| -> Vec<(usize, Rational)> {
        lam.iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(b, l)| (var(a, b), l.clone()))
            .collect()
    };
    for a in 0..m {
        for (si, &s) in states.iter().enumerate() {
            let target = if a == si { Rational::one() } else { Rational::zero() };
            lp.add_sparse(&effect_row(a, &chart.lambda[s]), Relation::Eq, target);
        }
    }
    for b in 0..k {
        let terms: Vec<(usize, Rational)> = (0..m).map(|a| (var(a, b), Rational::one())).collect();
        lp.add_sparse(&terms, Relation::Eq, Rational::one());
    }
    for a in 0..m {
        for lam in &chart.lambda {
            lp.add_sparse(&effect_row(a, lam), Relation::Ge, Rational::zero());
        }
    }
    Ok((lp, chart))
}

/// A single measurement whose outcome `a` certifies state `states[a]`, if one exists.
pub fn perfect_measurement(sys: &GptSystem, states: &[usize]) -> Result<Option<Measurement>> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("empty state set".into()));
    }
    let (lp, chart) = measurement_lp(sys, states)?;
    let out = lp::solve(&lp)?;
    if !out.is_feasible() {
        return Ok(None);
    }
    let y = out.witness.unwrap();
    let k = chart.size();
    let effects = (0..states.len())
        .map(|a| {
            let (c, off) = chart.functional(&y[a * k..(a + 1) * k]);
            Effect::new(sys.shape().clone(), c, off)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Measurement::new(effects)?;
    verify_measurement_witness(sys, states, &m)?;
    Ok(Some(m))
}

fn verify_measurement_witness(sys: &GptSystem, states: &[usize], m: &Measurement) -> Result<()> {
    if m.outcome_count() != states.len() || !m.is_valid_for(sys)? {
        return Err(Error::Invariant("discriminating measurement is not valid".into()));
    }
    for (a, e) in m.effects().iter().enumerate() {
        for (si, &s) in states.iter().enumerate() {
            let v = e.evaluate(sys.vertex(s))?;
            if v != Rational::from_integer((a == si) as i64) {
                return Err(Error::Invariant(format!(
                    "outcome {a} has probability {v} on state {s}"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurementWitness {
    pub states: Vec<usize>,
    pub measurement: Measurement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementDimension {
    pub value: usize,
    pub witness: MeasurementWitness,
    /// True when every clique one size larger was shown infeasible.
    pub exact: bool,
    pub lp_count: usize,
}

/// Largest `m` such that some m-clique of the graph is discriminated by one
/// measurement, searching sizes `3..=certify_limit`.
pub fn measurement_dimension(
    sys: &GptSystem,
    graph: &DistinguishabilityGraph,
    certify_limit: usize,
) -> Result<MeasurementDimension> {
    if certify_limit < 2 {
        return Err(Error::InvalidArgument(format!(
            "certify limit must be at least 2, got {certify_limit}"
        )));
    }
    let g = graph.to_graph();
    let first_edge = (0..g.vertex_count())
        .flat_map(|i| (i + 1..g.vertex_count()).map(move |j| (i, j)))
        .find(|&(i, j)| g.has_edge(i, j));
    let Some((i, j)) = first_edge else {
        return Ok(MeasurementDimension {
            value: 1,
            witness: MeasurementWitness {
                states: vec![0],
                measurement: Measurement::new(vec![Effect::unit(sys.shape())])?,
            },
            exact: true,
            lp_count: 0,
        });
    };
    let e = graph.witness(i, j).unwrap();
    let mut best = MeasurementDimension {
        value: 2,
        witness: MeasurementWitness {
            states: vec![i, j],
            measurement: Measurement::new(vec![e.clone(), e.complement()])?,
        },
        exact: false,
        lp_count: 0,
    };
    let mut lp_count = 0;
    let mut size = 3;
    loop {
        if size > certify_limit {
            break;
        }
        let cliques = g.cliques_of_size(size);
        if cliques.is_empty() {
            best.exact = true;
            break;
        }
        let found = cliques
            .par_iter()
            .map(|c| perfect_measurement(sys, c).map(|m| m.map(|m| (c.clone(), m))))
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            Some(Err(e)) => return Err(e),
            Some(Ok(Some((states, measurement)))) => {
                lp_count += cliques.iter().position(|c| *c == states).unwrap() + 1;
                best.value = size;
                best.witness = MeasurementWitness {
                    states,
                    measurement,
                };
            }
            _ => {
                lp_count += cliques.len();
                best.exact = true;
                break;
            }
        }
        size += 1;
    }
    best.lp_count = lp_count;
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub system: String,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub d_m: usize,
    pub d_i: usize,
    pub d_m_exact: bool,
    pub d_m_witness: MeasurementWitness,
    pub d_i_witness: Vec<usize>,
    /// Separating effect for each ordered clique pair `(i, j)`, `i < j`.
    #[serde(skip)]
    pub clique_witnesses: Vec<(usize, usize, Effect)>,
}

impl DimensionReport {
    /// Re-verifies every witness against the system by direct evaluation.
    pub fn verify(&self, sys: &GptSystem) -> Result<()> {
        if self.d_m > self.d_i {
            return Err(Error::Invariant(format!(
                "d_m = {} exceeds d_i = {}",
                self.d_m, self.d_i
            )));
        }
        if self.d_i_witness.len() != self.d_i || self.d_m_witness.states.len() != self.d_m {
            return Err(Error::Invariant("witness sizes disagree with dimensions".into()));
        }
        for (i, j, e) in &self.clique_witnesses {
            if !e.evaluate(sys.vertex(*i))?.is_one()
                || !e.evaluate(sys.vertex(*j))?.is_zero()
                || !e.is_valid_for(sys)?
            {
                return Err(Error::Invariant(format!("clique edge ({i}, {j}) fails")));
            }
        }
        let expected = self.d_i * (self.d_i - 1) / 2;
        if self.clique_witnesses.len() != expected {
            return Err(Error::Invariant("missing clique edge witnesses".into()));
        }
        verify_measurement_witness(sys, &self.d_m_witness.states, &self.d_m_witness.measurement)
    }
}

/// Both dimensions with witnesses.
pub fn dimension_report(sys: &GptSystem, options: &DimensionOptions) -> Result<DimensionReport> {
    let n = sys.vertex_count();
    let (graph, d_i, clique) = if n < 2 {
        (None, 1, vec![0])
    } else {
        let graph = build_graph_with(sys, options.route)?;
        let (d_i, clique) = information_dimension(&graph);
        (Some(graph), d_i, clique)
    };
    let (md, edge_count, clique_witnesses) = match &graph {
        None => (
            MeasurementDimension {
                value: 1,
                witness: MeasurementWitness {
                    states: vec![0],
                    measurement: Measurement::new(vec![Effect::unit(sys.shape())])?,
                },
                exact: true,
                lp_count: 0,
            },
            0,
            Vec::new(),
        ),
        Some(graph) => {
            let md = measurement_dimension(sys, graph, options.limit_for(sys))?;
            let mut cw = Vec::new();
            for (a, &i) in clique.iter().enumerate() {
                for &j in &clique[a + 1..] {
                    cw.push((i, j, graph.witness(i, j).unwrap()));
                }
            }
            (md, graph.edge_count(), cw)
        }
    };
    let report = DimensionReport {
        system: sys.name().to_string(),
        vertex_count: n,
        edge_count,
        d_m: md.value,
        d_i,
        d_m_exact: md.exact,
        d_m_witness: md.witness,
        d_i_witness: clique,
        clique_witnesses,
    };
    report.verify(sys)?;
    Ok(report)
}
