//! Composite boxworld systems.
//!
//! An [`NsBox`] is a k-party conditional distribution with binary inputs and
//! outputs per party. Joint settings and joint outcomes are packed as
//! integers with party 0 in the most significant bit, and the table entry for
//! `(x, a)` sits at `x * 2^k + a`. Read as a single system, a box is a state
//! over `2^k` settings with `2^k` outcomes each.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp;
use crate::polytope::{self, Halfspace};
use crate::rational::Rational;
use crate::system::{GbitLabel, GptSystem, State, SystemShape};

/// Default cap on `2^(2^k)` vertices for [`amplify`].
pub const DEFAULT_VERTEX_CAP: u128 = 1 << 16;

fn bit(word: usize, party: usize, parties: usize) -> bool {
    word >> (parties - 1 - party) & 1 == 1
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NsBox {
    parties: usize,
    table: Vec<Rational>,
}

impl std::fmt::Debug for NsBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NsBox<{}>{:?}", self.parties, self.table)
    }
}

impl NsBox {
    /// Validates nonnegativity, normalization and no-signaling.
    pub fn new(parties: usize, table: Vec<Rational>) -> Result<Self> {
        if parties == 0 || parties > 8 {
            return Err(Error::InvalidArgument(format!("unsupported party count {parties}")));
        }
        let side = 1usize << parties;
        if table.len() != side * side {
            return Err(Error::InvalidState(format!(
                "{parties}-party box needs {} entries, got {}",
                side * side,
                table.len()
            )));
        }
        if let Some(p) = table.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidState(format!("negative probability {p}")));
        }
        for x in 0..side {
            let total: Rational = table[x * side..(x + 1) * side].iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidState(format!(
                    "joint setting {x} sums to {total}"
                )));
            }
        }
        check_no_signaling(parties, &table)?;
        Ok(NsBox { parties, table })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    fn side(&self) -> usize {
        1 << self.parties
    }

    pub fn prob(&self, settings: usize, outcomes: usize) -> &Rational {
        &self.table[settings * self.side() + outcomes]
    }

    /// The box read as one system with `2^k` settings of `2^k` outcomes.
    pub fn joint_shape(parties: usize) -> SystemShape {
        let side = 1 << parties;
        SystemShape::new(vec![side; side]).expect("side >= 2")
    }

    pub fn to_state(&self) -> State {
        State::new(Self::joint_shape(self.parties), self.table.clone()).expect("valid box table")
    }

    pub fn from_state(parties: usize, state: &State) -> Result<Self> {
        let shape = Self::joint_shape(parties);
        if *state.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: shape.to_string(),
                found: state.shape().to_string(),
            });
        }
        NsBox::new(parties, state.table().to_vec())
    }

    /// `P(a_party = outcome | x_party = setting)`, well defined by no-signaling.
    pub fn marginal(&self, party: usize, setting: bool, outcome: bool) -> Rational {
        let k = self.parties;
        let x = (setting as usize) << (k - 1 - party);
        (0..self.side())
            .filter(|&a| bit(a, party, k) == outcome)
            .map(|a| self.prob(x, a))
            .sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.table.iter().all(|p| p.is_zero() || p.is_one())
    }

    /// Every party's local outcome is uniformly random at both settings.
    pub fn has_uniform_marginals(&self) -> bool {
        let half = Rational::new(1, 2);
        (0..self.parties).all(|p| {
            [false, true]
                .iter()
                .all(|&s| self.marginal(p, s, false) == half)
        })
    }

    /// `f(x)` when the parity of all outcomes is a deterministic function of
    /// the joint setting.
    pub fn parity_function(&self) -> Option<Vec<bool>> {
        let state = parity_project(self);
        let label = state.deterministic_label()?;
        Some(label.outcomes.into_iter().map(|o| o == 1).collect())
    }

    /// Conditional state of the other party of a bipartite box after `party`
    /// observes `outcome` at `setting`; `None` when that event has probability 0.
    pub fn conditional_state(&self, party: usize, setting: bool, outcome: bool) -> Result<Option<State>> {
        if self.parties != 2 || party > 1 {
            return Err(Error::InvalidArgument(
                "conditional states are defined for bipartite boxes".into(),
            ));
        }
        let p = self.marginal(party, setting, outcome);
        if p.is_zero() {
            return Ok(None);
        }
        let other = 1 - party;
        let mut table = Vec::with_capacity(4);
        for y in [false, true] {
            for b in [false, true] {
                let pack = |mine: bool, theirs: bool| -> usize {
                    if party == 0 {
                        (mine as usize) << 1 | theirs as usize
                    } else {
                        (theirs as usize) << 1 | mine as usize
                    }
                };
                let x = pack(setting, y);
                let a = pack(outcome, b);
                debug_assert_eq!(bit(a, other, 2), b);
                table.push(self.prob(x, a) / &p);
            }
        }
        Ok(Some(State::new(SystemShape::binary(2)?, table)?))
    }
}

pub fn check_no_signaling(parties: usize, table: &[Rational]) -> Result<()> {
    let side = 1usize << parties;
    for p in 0..parties {
        let mask = 1usize << (parties - 1 - p);
        for x in (0..side).filter(|x| x & mask == 0) {
            for rest in (0..side).filter(|a| a & mask == 0) {
                let here = &table[x * side + rest] + &table[x * side + (rest | mask)];
                let xf = x | mask;
                let there = &table[xf * side + rest] + &table[xf * side + (rest | mask)];
                if here != there {
                    return Err(Error::Signaling(format!(
                        "marginal of the parties other than {p} changes with party {p}'s setting \
                         (joint setting {x}, outcomes {rest}: {here} vs {there})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Bipartite correlation `a1 ^ a2 = alpha x1 x2 ^ beta x1 ^ gamma x2 ^ delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BoxCorrelationLabel {
    pub alpha: bool,
    pub beta: bool,
    pub gamma: bool,
    pub delta: bool,
}

impl BoxCorrelationLabel {
    pub fn evaluate(&self, x1: bool, x2: bool) -> bool {
        (self.alpha && x1 && x2) ^ (self.beta && x1) ^ (self.gamma && x2) ^ self.delta
    }

    /// Algebraic normal form of a two-bit function given as `f(00), f(01), f(10), f(11)`.
    pub fn from_function(f: &[bool]) -> Self {
        assert_eq!(f.len(), 4);
        let delta = f[0];
        let gamma = f[1] ^ f[0];
        let beta = f[2] ^ f[0];
        let alpha = f[3] ^ f[2] ^ f[1] ^ f[0];
        BoxCorrelationLabel {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn all() -> impl Iterator<Item = BoxCorrelationLabel> {
        (0u8..16).map(|n| BoxCorrelationLabel {
            alpha: n & 8 != 0,
            beta: n & 4 != 0,
            gamma: n & 2 != 0,
            delta: n & 1 != 0,
        })
    }
}

/// k-party box with uniformly random outcomes subject to
/// `a_1 ^ ... ^ a_k = f(x)`; `f` is indexed by the packed joint setting.
pub fn parity_box(parties: usize, f: &[bool]) -> Result<NsBox> {
    let side = 1usize << parties;
    if f.len() != side {
        return Err(Error::InvalidArgument(format!(
            "parity function needs {side} values, got {}",
            f.len()
        )));
    }
    let weight = Rational::inverse_power_of_two(parties as u32 - 1);
    let mut table = vec![Rational::zero(); side * side];
    for x in 0..side {
        for a in 0..side {
            if (a.count_ones() % 2 == 1) == f[x] {
                table[x * side + a] = weight.clone();
            }
        }
    }
    NsBox::new(parties, table)
}

/// PR-type box for a correlation label (uniform marginals).
pub fn pr_box(label: BoxCorrelationLabel) -> NsBox {
    let f: Vec<bool> = (0..4).map(|x| label.evaluate(x & 2 != 0, x & 1 != 0)).collect();
    parity_box(2, &f).expect("two-party parity box")
}

/// Product of two deterministic g-bit states.
pub fn local_deterministic(first: GbitLabel, second: GbitLabel) -> NsBox {
    let mut table = vec![Rational::zero(); 16];
    for x in 0..4usize {
        let a1 = first.outcome(x & 2 != 0) as usize;
        let a2 = second.outcome(x & 1 != 0) as usize;
        table[x * 4 + (a1 << 1 | a2)] = Rational::one();
    }
    NsBox::new(2, table).expect("product box")
}

/// Equalities (normalization, no-signaling) and nonnegativity of the
/// k-party binary no-signaling polytope.
pub fn no_signaling_polytope(parties: usize) -> (usize, Vec<Halfspace>, Vec<Halfspace>) {
    let side = 1usize << parties;
    let n = side * side;
    let unit = |i: usize| {
        let mut c = vec![Rational::zero(); n];
        c[i] = Rational::one();
        c
    };
    let mut eq = Vec::new();
    for x in 0..side {
        let mut c = vec![Rational::zero(); n];
        for a in 0..side {
            c[x * side + a] = Rational::one();
        }
        eq.push(Halfspace::new(c, Rational::one()));
    }
    for p in 0..parties {
        let mask = 1usize << (parties - 1 - p);
        for x in (0..side).filter(|x| x & mask == 0) {
            for rest in (0..side).filter(|a| a & mask == 0) {
                let mut c = vec![Rational::zero(); n];
                for a in [rest, rest | mask] {
                    c[x * side + a] += Rational::one();
                    c[(x | mask) * side + a] -= Rational::one();
                }
                eq.push(Halfspace::new(c, Rational::zero()));
            }
        }
    }
    let ineq = (0..n).map(|i| Halfspace::new(unit(i), Rational::zero())).collect();
    (n, eq, ineq)
}

/// All extreme points of the maximal tensor product of two g-bits, i.e. the
/// bipartite binary no-signaling polytope, sorted by table.
pub fn maximal_tensor_gbits() -> Result<Vec<NsBox>> {
    let (n, eq, ineq) = no_signaling_polytope(2);
    polytope::enumerate_vertices(n, &eq, &ineq)
        .into_iter()
        .map(|t| NsBox::new(2, t))
        .collect()
}

/// Every conditional state of each party, for each outcome of nonzero
/// probability, lies in `sys`.
pub fn steering_check(b: &NsBox, sys: &GptSystem) -> Result<bool> {
    let gbit_shape = SystemShape::binary(2)?;
    if b.parties() != 2 || *sys.shape() != gbit_shape {
        return Err(Error::ShapeMismatch {
            expected: "bipartite box over two binary settings per party".into(),
            found: format!("{}-party box, system shape {}", b.parties(), sys.shape()),
        });
    }
    for party in 0..2 {
        for setting in [false, true] {
            for outcome in [false, true] {
                if let Some(cond) = b.conditional_state(party, setting, outcome)? {
                    if lp::convex_weights(&cond, sys.vertices())?.is_none() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `P(a | x) = sum of P(a_1..a_k | x)` over outcome tuples of parity `a`,
/// as a state over the `2^k` joint settings.
pub fn parity_project(b: &NsBox) -> State {
    let side = b.side();
    let mut table = Vec::with_capacity(2 * side);
    for x in 0..side {
        let mut even = Rational::zero();
        let mut odd = Rational::zero();
        for a in 0..side {
            let p = b.prob(x, a);
            if p.is_zero() {
                continue;
            }
            if a.count_ones() % 2 == 0 {
                even += p;
            } else {
                odd += p;
            }
        }
        table.push(even);
        table.push(odd);
    }
    State::new(SystemShape::binary(side).unwrap(), table).expect("projection of a valid box")
}

/// Distinct parity projections of `boxes`, sorted by table.
pub fn project_system(name: &str, boxes: &[NsBox]) -> Result<GptSystem> {
    let parties = boxes
        .first()
        .ok_or_else(|| Error::InvalidArgument("no boxes to project".into()))?
        .parties();
    if boxes.iter().any(|b| b.parties() != parties) {
        return Err(Error::InvalidArgument("boxes have different party counts".into()));
    }
    let distinct: BTreeSet<Vec<Rational>> = boxes
        .iter()
        .map(|b| parity_project(b).into_table())
        .collect();
    let shape = SystemShape::binary(1 << parties)?;
    let states = distinct
        .into_iter()
        .map(|t| State::new(shape.clone(), t))
        .collect::<Result<Vec<_>>>()?;
    GptSystem::new(name, shape, states)
}

/// The projected k-g-bit system built directly: one deterministic vertex per
/// boolean function on `k` bits, over `2^k` binary settings.
pub fn amplify(parties: usize, vertex_cap: u128) -> Result<GptSystem> {
    if parties == 0 {
        return Err(Error::InvalidArgument("amplification needs at least one g-bit".into()));
    }
    if parties >= 7 {
        return Err(Error::CapExceeded {
            what: "amplified vertex count",
            requested: u128::MAX,
            cap: vertex_cap,
        });
    }
    let settings = 1usize << parties;
    let count: u128 = 1 << settings;
    if count > vertex_cap {
        return Err(Error::CapExceeded {
            what: "amplified vertex count",
            requested: count,
            cap: vertex_cap,
        });
    }
    let shape = SystemShape::binary(settings)?;
    let vertices = (0..count)
        .map(|f| {
            let outcomes: Vec<usize> = (0..settings)
                .map(|x| (f >> (settings - 1 - x)) as usize & 1)
                .collect();
            State::deterministic(&shape, &outcomes)
        })
        .collect::<Result<Vec<_>>>()?;
    GptSystem::new(format!("amplify-{parties}"), shape, vertices)
}

/// A setting permutation with per-setting outcome relabelings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relabeling {
    /// Source setting `x` maps to target setting `settings[x]`.
    pub settings: Vec<usize>,
    /// Source outcome `a` of setting `x` maps to `outcomes[x][a]`.
    pub outcomes: Vec<Vec<usize>>,
}

impl Relabeling {
    pub fn apply(&self, state: &State, target: &SystemShape) -> Result<State> {
        let mut table = vec![Rational::zero(); target.table_length()];
        for (x, (&tx, perm)) in self.settings.iter().zip(&self.outcomes).enumerate() {
            for (a, p) in state.distribution(x).iter().enumerate() {
                table[target.coordinate(tx, perm[a])?] = p.clone();
            }
        }
        State::new(target.clone(), table)
    }
}

/// Searches for a relabeling mapping the vertex set of `a` onto that of `b`.
pub fn find_isomorphism(a: &GptSystem, b: &GptSystem) -> Option<Relabeling> {
    if a.vertex_count() != b.vertex_count() {
        return None;
    }
    let mut sa = a.shape().arities().to_vec();
    let mut sb = b.shape().arities().to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let mut search = IsoSearch {
        a,
        b,
        used: vec![false; b.shape().setting_count()],
        settings: Vec::new(),
        outcomes: Vec::new(),
    };
    if !search.extend() {
        return None;
    }
    Some(Relabeling {
        settings: search.settings,
        outcomes: search.outcomes,
    })
}

pub fn isomorphic(a: &GptSystem, b: &GptSystem) -> bool {
    find_isomorphism(a, b).is_some()
}

struct IsoSearch<'a> {
    a: &'a GptSystem,
    b: &'a GptSystem,
    used: Vec<bool>,
    settings: Vec<usize>,
    outcomes: Vec<Vec<usize>>,
}

impl IsoSearch<'_> {
    /// Multisets of partial tables agree on the settings assigned so far.
    fn consistent(&self) -> bool {
        let mut pa: Vec<Vec<&Rational>> = self
            .a
            .vertices()
            .iter()
            .map(|v| {
                let mut row = Vec::new();
                for (x, perm) in self.outcomes.iter().enumerate() {
                    let dist = v.distribution(x);
                    let mut mapped = vec![&dist[0]; dist.len()];
                    for (o, p) in dist.iter().enumerate() {
                        mapped[perm[o]] = p;
                    }
                    row.extend(mapped);
                }
                row
            })
            .collect();
        let mut pb: Vec<Vec<&Rational>> = self
            .b
            .vertices()
            .iter()
            .map(|v| {
                self.settings
                    .iter()
                    .flat_map(|&tx| v.distribution(tx).iter())
                    .collect()
            })
            .collect();
        pa.sort_unstable();
        pb.sort_unstable();
        pa == pb
    }

    fn extend(&mut self) -> bool {
        let x = self.settings.len();
        if x == self.a.shape().setting_count() {
            return true;
        }
        let arity = self.a.shape().arity(x);
        for tx in 0..self.b.shape().setting_count() {
            if self.used[tx] || self.b.shape().arity(tx) != arity {
                continue;
            }
            self.used[tx] = true;
            self.settings.push(tx);
            for perm in (0..arity).permutations(arity) {
                self.outcomes.push(perm);
                if self.consistent() && self.extend() {
                    return true;
                }
                self.outcomes.pop();
            }
            self.settings.pop();
            self.used[tx] = false;
        }
        false
    }
}
