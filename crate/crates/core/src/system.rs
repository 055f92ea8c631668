//! Single GPT systems: conditional-probability tables, effects and measurements.
//!
//! A state is stored as its full table `P(a | x)`, setting-major and
//! outcome-minor. A system is the convex hull of a finite vertex list.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp;
use crate::rational::{dot, Rational};

/// Outcome count per measurement setting.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SystemShape {
    arities: Vec<usize>,
    #[serde(skip)]
    offsets: Vec<usize>,
}

impl SystemShape {
    pub fn new(arities: Vec<usize>) -> Result<Self> {
        if arities.is_empty() {
            return Err(Error::InvalidShape("at least one setting is required".into()));
        }
        if let Some(x) = arities.iter().position(|&a| a < 2) {
            return Err(Error::InvalidShape(format!(
                "setting {x} has {} outcomes, at least 2 required",
                arities[x]
            )));
        }
        let mut offsets = Vec::with_capacity(arities.len());
        let mut acc = 0;
        for &a in &arities {
            offsets.push(acc);
            acc += a;
        }
        Ok(SystemShape { arities, offsets })
    }

    /// `count` binary settings.
    pub fn binary(count: usize) -> Result<Self> {
        Self::new(vec![2; count])
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn setting_count(&self) -> usize {
        self.arities.len()
    }

    pub fn arity(&self, setting: usize) -> usize {
        self.arities[setting]
    }

    pub fn table_length(&self) -> usize {
        self.offsets.last().unwrap() + self.arities.last().unwrap()
    }

    pub fn is_binary(&self) -> bool {
        self.arities.iter().all(|&a| a == 2)
    }

    /// Flat table position of `(setting, outcome)`.
    pub fn coordinate(&self, setting: usize, outcome: usize) -> Result<usize> {
        if setting >= self.arities.len() {
            return Err(Error::IndexOutOfRange {
                what: "setting",
                index: setting,
                limit: self.arities.len(),
            });
        }
        if outcome >= self.arities[setting] {
            return Err(Error::IndexOutOfRange {
                what: "outcome",
                index: outcome,
                limit: self.arities[setting],
            });
        }
        Ok(self.offsets[setting] + outcome)
    }

    pub(crate) fn offset(&self, setting: usize) -> usize {
        self.offsets[setting]
    }

    fn check_same(&self, other: &SystemShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Debug for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.arities.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// A deterministic state: one outcome per setting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureStateLabel {
    pub outcomes: Vec<usize>,
}

impl PureStateLabel {
    pub fn new(outcomes: Vec<usize>) -> Self {
        PureStateLabel { outcomes }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        PureStateLabel {
            outcomes: bits.iter().map(|&b| b as usize).collect(),
        }
    }

    pub fn to_state(&self, shape: &SystemShape) -> Result<State> {
        State::deterministic(shape, &self.outcomes)
    }
}

/// g-bit pure state `a = alpha * x XOR beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GbitLabel {
    pub alpha: bool,
    pub beta: bool,
}

impl GbitLabel {
    pub fn outcome(&self, setting: bool) -> bool {
        (self.alpha && setting) ^ self.beta
    }

    pub fn to_label(self) -> PureStateLabel {
        PureStateLabel::from_bits(&[self.outcome(false), self.outcome(true)])
    }
}

/// A normalized conditional-probability table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State {
    shape: SystemShape,
    table: Vec<Rational>,
}

impl State {
    pub fn new(shape: SystemShape, table: Vec<Rational>) -> Result<Self> {
        if table.len() != shape.table_length() {
            return Err(Error::InvalidState(format!(
                "table has {} entries, shape {shape} needs {}",
                table.len(),
                shape.table_length()
            )));
        }
        for (x, &arity) in shape.arities().iter().enumerate() {
            let block = &table[shape.offset(x)..shape.offset(x) + arity];
            if let Some(p) = block.iter().find(|p| !p.is_probability()) {
                return Err(Error::InvalidState(format!(
                    "entry {p} at setting {x} outside [0, 1]"
                )));
            }
            let total: Rational = block.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidState(format!(
                    "setting {x} sums to {total}, not 1"
                )));
            }
        }
        Ok(State { shape, table })
    }

    pub fn deterministic(shape: &SystemShape, outcomes: &[usize]) -> Result<Self> {
        if outcomes.len() != shape.setting_count() {
            return Err(Error::InvalidState(format!(
                "label has {} outcomes for {} settings",
                outcomes.len(),
                shape.setting_count()
            )));
        }
        let mut table = vec![Rational::zero(); shape.table_length()];
        for (x, &a) in outcomes.iter().enumerate() {
            table[shape.coordinate(x, a)?] = Rational::one();
        }
        Ok(State {
            shape: shape.clone(),
            table,
        })
    }

    /// Uniform outcome distribution at every setting.
    pub fn maximally_mixed(shape: &SystemShape) -> Self {
        let mut table = Vec::with_capacity(shape.table_length());
        for &a in shape.arities() {
            table.extend(std::iter::repeat_n(Rational::new(1, a as i64), a));
        }
        State {
            shape: shape.clone(),
            table,
        }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn into_table(self) -> Vec<Rational> {
        self.table
    }

    pub fn prob(&self, setting: usize, outcome: usize) -> Result<&Rational> {
        Ok(&self.table[self.shape.coordinate(setting, outcome)?])
    }

    /// Outcome distribution of one setting.
    pub fn distribution(&self, setting: usize) -> &[Rational] {
        let off = self.shape.offset(setting);
        &self.table[off..off + self.shape.arity(setting)]
    }

    pub fn is_deterministic(&self) -> bool {
        self.table.iter().all(|p| p.is_zero() || p.is_one())
    }

    /// The outcome at each setting, if every setting is deterministic.
    pub fn deterministic_label(&self) -> Option<PureStateLabel> {
        let mut outcomes = Vec::with_capacity(self.shape.setting_count());
        for x in 0..self.shape.setting_count() {
            outcomes.push(self.distribution(x).iter().position(|p| p.is_one())?);
        }
        Some(PureStateLabel { outcomes })
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State{:?}", self.table)
    }
}

/// Affine functional `offset + coefficients . table`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Effect {
    #[serde(skip)]
    shape: SystemShape,
    coefficients: Vec<Rational>,
    offset: Rational,
}

impl Effect {
    pub fn new(shape: SystemShape, coefficients: Vec<Rational>, offset: Rational) -> Result<Self> {
        if coefficients.len() != shape.table_length() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", shape.table_length()),
                found: format!("{} coefficients", coefficients.len()),
            });
        }
        Ok(Effect {
            shape,
            coefficients,
            offset,
        })
    }

    /// The unit effect `u`.
    pub fn unit(shape: &SystemShape) -> Self {
        Self::constant(shape, Rational::one())
    }

    pub fn constant(shape: &SystemShape, value: Rational) -> Self {
        Effect {
            shape: shape.clone(),
            coefficients: vec![Rational::zero(); shape.table_length()],
            offset: value,
        }
    }

    /// Reads `P(outcome | setting)`.
    pub fn atomic(shape: &SystemShape, setting: usize, outcome: usize) -> Result<Self> {
        let mut coefficients = vec![Rational::zero(); shape.table_length()];
        coefficients[shape.coordinate(setting, outcome)?] = Rational::one();
        Ok(Effect {
            shape: shape.clone(),
            coefficients,
            offset: Rational::zero(),
        })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    /// `u - e`.
    pub fn complement(&self) -> Self {
        Effect {
            shape: self.shape.clone(),
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            offset: Rational::one() - &self.offset,
        }
    }

    pub fn plus(&self, other: &Effect) -> Result<Self> {
        self.shape.check_same(&other.shape)?;
        Ok(Effect {
            shape: self.shape.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
            offset: &self.offset + &other.offset,
        })
    }

    pub fn evaluate(&self, state: &State) -> Result<Rational> {
        self.shape.check_same(&state.shape)?;
        Ok(self.evaluate_table(&state.table))
    }

    pub(crate) fn evaluate_table(&self, table: &[Rational]) -> Rational {
        &self.offset + dot(&self.coefficients, table)
    }

    /// `0 <= e(v) <= 1` at every vertex.
    pub fn is_valid_for(&self, sys: &GptSystem) -> Result<bool> {
        sys.shape.check_same(&self.shape)?;
        Ok(sys
            .vertices
            .iter()
            .all(|v| self.evaluate_table(&v.table).is_probability()))
    }
}

impl fmt::Debug for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Effect({:?} + {:?})", self.offset, self.coefficients)
    }
}

/// A family of effects decomposing the unit effect on the system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Measurement {
    effects: Vec<Effect>,
}

impl Measurement {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidArgument("measurement needs at least one effect".into()))?;
        for e in &effects[1..] {
            first.shape.check_same(&e.shape)?;
        }
        Ok(Measurement { effects })
    }

    /// The pure measurement of one setting: its atomic effects.
    pub fn setting(shape: &SystemShape, setting: usize) -> Result<Self> {
        if setting >= shape.setting_count() {
            return Err(Error::IndexOutOfRange {
                what: "setting",
                index: setting,
                limit: shape.setting_count(),
            });
        }
        let effects = (0..shape.arity(setting))
            .map(|a| Effect::atomic(shape, setting, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Measurement { effects })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn outcome_count(&self) -> usize {
        self.effects.len()
    }

    pub fn shape(&self) -> &SystemShape {
        &self.effects[0].shape
    }

    pub fn probabilities(&self, state: &State) -> Result<Vec<Rational>> {
        self.effects.iter().map(|e| e.evaluate(state)).collect()
    }

    pub fn is_valid_for(&self, sys: &GptSystem) -> Result<bool> {
        for e in &self.effects {
            if !e.is_valid_for(sys)? {
                return Ok(false);
            }
        }
        Ok(sys.vertices.iter().all(|v| {
            self.effects
                .iter()
                .map(|e| e.evaluate_table(&v.table))
                .sum::<Rational>()
                .is_one()
        }))
    }
}

/// State space given by a finite list of pure states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GptSystem {
    name: String,
    shape: SystemShape,
    vertices: Vec<State>,
}

impl GptSystem {
    /// Validates states, distinctness and extremality of every vertex.
    pub fn new(name: impl Into<String>, shape: SystemShape, vertices: Vec<State>) -> Result<Self> {
        let sys = Self::from_hull_points(name, shape, vertices)?;
        for i in 0..sys.vertices.len() {
            if sys.vertices[i].is_deterministic() {
                // 0/1 tables are vertices of the product of simplices holding every state.
                continue;
            }
            let others: Vec<State> = sys
                .vertices
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if !others.is_empty() && lp::is_redundant_vertex(&sys.vertices[i], &others)? {
                return Err(Error::RedundantVertex(i));
            }
        }
        Ok(sys)
    }

    /// Like [`GptSystem::new`] but without the extremality check: the state
    /// space is the hull of `points`, which may include mixed states.
    pub fn from_hull_points(
        name: impl Into<String>,
        shape: SystemShape,
        points: Vec<State>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("system needs at least one state".into()));
        }
        let mut seen: HashMap<&[Rational], usize> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            shape.check_same(&p.shape)?;
            if let Some(&j) = seen.get(p.table.as_slice()) {
                return Err(Error::DuplicateVertex(j, i));
            }
            seen.insert(&p.table, i);
        }
        drop(seen);
        Ok(GptSystem {
            name: name.into(),
            shape,
            vertices: points,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn vertices(&self) -> &[State] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &State {
        &self.vertices[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn maximally_mixed(&self) -> State {
        let w = vec![Rational::new(1, self.vertices.len() as i64); self.vertices.len()];
        mix(&self.vertices, &w).expect("uniform weights over own vertices")
    }

    pub fn all_deterministic(&self) -> bool {
        self.vertices.iter().all(State::is_deterministic)
    }

    /// Vertex tables as a sorted list, for set comparisons.
    pub fn sorted_tables(&self) -> Vec<&[Rational]> {
        let mut t: Vec<&[Rational]> = self.vertices.iter().map(|v| v.table()).collect();
        t.sort();
        t
    }
}

/// The g-bit: two binary settings, vertices in the canonical order
/// `(0,0), (1,0), (1,1), (0,1)` listing the outcome at `x = 0` then `x = 1`.
pub fn make_gbit() -> GptSystem {
    let shape = SystemShape::binary(2).unwrap();
    let labels = [(0, 0), (1, 0), (1, 1), (0, 1)];
    let vertices = labels
        .iter()
        .map(|&(a0, a1)| State::deterministic(&shape, &[a0, a1]).unwrap())
        .collect();
    GptSystem {
        name: "gbit".into(),
        shape,
        vertices,
    }
}

/// All `2^dim` deterministic binary labels, lexicographic with setting 0 most significant.
pub fn make_hypercube(dim: usize) -> Result<GptSystem> {
    if dim == 0 {
        return Err(Error::InvalidArgument("hypercube dimension must be at least 1".into()));
    }
    if dim > 20 {
        return Err(Error::CapExceeded {
            what: "hypercube vertex count",
            requested: 1u128 << dim,
            cap: 1 << 20,
        });
    }
    let shape = SystemShape::binary(dim)?;
    let vertices = (0..1usize << dim)
        .map(|n| {
            let bits: Vec<usize> = (0..dim).map(|i| (n >> (dim - 1 - i)) & 1).collect();
            State::deterministic(&shape, &bits).unwrap()
        })
        .collect();
    Ok(GptSystem {
        name: format!("hypercube-{dim}"),
        shape,
        vertices,
    })
}

/// The classical simplex with `d` pure states.
pub fn make_classical(d: usize) -> Result<GptSystem> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "classical dimension must be at least 2, got {d}"
        )));
    }
    let shape = SystemShape::new(vec![d])?;
    let vertices = (0..d)
        .map(|a| State::deterministic(&shape, &[a]).unwrap())
        .collect();
    Ok(GptSystem {
        name: format!("classical-{d}"),
        shape,
        vertices,
    })
}

pub fn atomic_effect(shape: &SystemShape, setting: usize, outcome: usize) -> Result<Effect> {
    Effect::atomic(shape, setting, outcome)
}

pub fn evaluate(effect: &Effect, state: &State) -> Result<Rational> {
    effect.evaluate(state)
}

pub fn is_valid_effect(effect: &Effect, sys: &GptSystem) -> Result<bool> {
    effect.is_valid_for(sys)
}

pub fn is_valid_measurement(m: &Measurement, sys: &GptSystem) -> Result<bool> {
    m.is_valid_for(sys)
}

/// Convex combination of states.
pub fn mix(states: &[State], weights: &[Rational]) -> Result<State> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidArgument("mix needs at least one state".into()))?;
    if states.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| w.is_negative()) {
        return Err(Error::InvalidArgument(format!("negative weight {w}")));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
    }
    let mut table = vec![Rational::zero(); first.table.len()];
    for (s, w) in states.iter().zip(weights) {
        first.shape.check_same(&s.shape)?;
        if w.is_zero() {
            continue;
        }
        for (t, p) in table.iter_mut().zip(&s.table) {
            if !p.is_zero() {
                *t += w * p;
            }
        }
    }
    State::new(first.shape.clone(), table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn gbit_vertices() {
        let g = make_gbit();
        assert_eq!(g.vertex_count(), 4);
        assert!(g.all_deterministic());
        let w1 = g.vertex(0);
        assert!(w1.prob(0, 0).unwrap().is_one());
        assert!(w1.prob(1, 0).unwrap().is_one());
        let label = GbitLabel { alpha: true, beta: false }.to_label();
        assert_eq!(label.outcomes, vec![0, 1]);
        assert!(g.vertices().contains(&label.to_state(g.shape()).unwrap()));
    }

    #[test]
    fn gbit_labels_cover_all_alpha_beta() {
        let g = make_gbit();
        for alpha in [false, true] {
            for beta in [false, true] {
                let s = GbitLabel { alpha, beta }.to_label().to_state(g.shape()).unwrap();
                assert!(g.vertices().contains(&s));
            }
        }
    }

    #[test]
    fn hypercube_builders() {
        assert!(make_hypercube(0).is_err());
        assert_eq!(make_hypercube(1).unwrap().vertex_count(), 2);
        assert_eq!(make_hypercube(3).unwrap().vertex_count(), 8);
        assert_eq!(
            make_hypercube(2).unwrap().sorted_tables(),
            make_gbit().sorted_tables()
        );
    }

    #[test]
    fn classical_builder() {
        assert!(make_classical(1).is_err());
        let c = make_classical(3).unwrap();
        assert_eq!(c.vertex_count(), 3);
        for v in c.vertices() {
            assert_eq!(v.table().iter().filter(|p| p.is_one()).count(), 1);
            assert_eq!(v.table().iter().filter(|p| p.is_zero()).count(), 2);
        }
    }

    #[test]
    fn atomic_effects_on_gbit() {
        let g = make_gbit();
        let e1 = atomic_effect(g.shape(), 0, 0).unwrap();
        let vals: Vec<Rational> = g.vertices().iter().map(|v| e1.evaluate(v).unwrap()).collect();
        // one on exactly the two vertices answering a = 0 at x = 0
        assert_eq!(vals, vec![r(1, 1), r(0, 1), r(0, 1), r(1, 1)]);
        let mixed = g.maximally_mixed();
        assert_eq!(e1.evaluate(&mixed).unwrap(), r(1, 2));
        let e3 = atomic_effect(g.shape(), 0, 1).unwrap();
        let sum = e1.plus(&e3).unwrap();
        for v in g.vertices() {
            assert!(sum.evaluate(v).unwrap().is_one());
        }
        assert!(atomic_effect(g.shape(), 2, 0).is_err());
        assert!(atomic_effect(g.shape(), 0, 2).is_err());
    }

    #[test]
    fn validity_checks() {
        let g = make_gbit();
        let unit = Effect::unit(g.shape());
        assert!(unit.evaluate(&g.maximally_mixed()).unwrap().is_one());
        assert!(unit.is_valid_for(&g).unwrap());
        assert!(!Effect::constant(g.shape(), r(2, 1)).is_valid_for(&g).unwrap());
        let m = Measurement::new(vec![
            atomic_effect(g.shape(), 0, 0).unwrap(),
            atomic_effect(g.shape(), 0, 1).unwrap(),
        ])
        .unwrap();
        assert!(m.is_valid_for(&g).unwrap());
        let bad = Measurement::new(vec![atomic_effect(g.shape(), 0, 0).unwrap()]).unwrap();
        assert!(!bad.is_valid_for(&g).unwrap());
        let other = make_classical(4).unwrap();
        assert!(unit.evaluate(other.vertex(0)).is_err());
    }

    #[test]
    fn mixing() {
        let g = make_gbit();
        assert!(g.maximally_mixed().table().iter().all(|p| *p == r(1, 2)));
        assert_eq!(mix(&[g.vertex(0).clone()], &[r(1, 1)]).unwrap(), *g.vertex(0));
        // (0,0) and (0,1) differ only at x = 1.
        let m = mix(&[g.vertex(0).clone(), g.vertex(3).clone()], &[r(1, 3), r(2, 3)]).unwrap();
        assert_eq!(m.distribution(0), &[r(1, 1), r(0, 1)]);
        assert_eq!(m.distribution(1), &[r(1, 3), r(2, 3)]);
        assert!(mix(&[g.vertex(0).clone()], &[r(1, 2)]).is_err());
        assert!(mix(
            &[g.vertex(0).clone(), g.vertex(1).clone()],
            &[r(3, 2), r(-1, 2)]
        )
        .is_err());
    }

    #[test]
    fn state_validation() {
        let s = SystemShape::binary(1).unwrap();
        assert!(State::new(s.clone(), vec![r(1, 2), r(1, 2)]).is_ok());
        assert!(State::new(s.clone(), vec![r(1, 2), r(1, 3)]).is_err());
        assert!(State::new(s.clone(), vec![r(3, 2), r(-1, 2)]).is_err());
        assert!(State::new(s, vec![r(1, 1)]).is_err());
        assert!(SystemShape::new(vec![]).is_err());
        assert!(SystemShape::new(vec![2, 1]).is_err());
    }

    #[test]
    fn system_rejects_duplicates_and_interior_points() {
        let g = make_gbit();
        let v = g.vertex(0).clone();
        assert_eq!(
            GptSystem::new("dup", g.shape().clone(), vec![v.clone(), v]),
            Err(Error::DuplicateVertex(0, 1))
        );
        let mut pts = g.vertices().to_vec();
        pts.push(g.maximally_mixed());
        assert_eq!(
            GptSystem::new("mixed", g.shape().clone(), pts.clone()),
            Err(Error::RedundantVertex(4))
        );
        assert!(GptSystem::from_hull_points("hull", g.shape().clone(), pts).is_ok());
    }
}
