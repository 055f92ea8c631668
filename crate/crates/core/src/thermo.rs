//! Erasure and memory bookkeeping on hypercube bits.
//!
//! Costs are kept in bit-units of `k_B T log 2` as exact rationals and only
//! turned into joules when a temperature is supplied. All pure states carry
//! the same energy, so reversible updates are free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::{measure_vertex, BitString};
use crate::rational::Rational;
use crate::system::{State, SystemShape};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Largest memory the demon protocol accepts.
pub const MAX_MEMORY_DIMENSION: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operation {
    Flip { coordinate: usize },
    Rotate,
    Measure { setting: usize, outcome: bool },
    EraseRegister { bits: usize },
    Reset,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub step: u64,
    pub operation: Operation,
    pub cost_bits: Rational,
}

/// Setting permutation plus flip mask: `zeta'_i = zeta_{perm[i]} XOR mask_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Transform {
    perm: Vec<usize>,
    mask: Vec<bool>,
}

impl Transform {
    pub fn new(perm: Vec<usize>, mask: Vec<bool>) -> Result<Self> {
        if perm.len() != mask.len() {
            return Err(Error::InvalidArgument(format!(
                "permutation of {} settings with a {}-bit mask",
                perm.len(),
                mask.len()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Transform { perm, mask })
    }

    pub fn identity(d: usize) -> Self {
        Transform {
            perm: (0..d).collect(),
            mask: vec![false; d],
        }
    }

    pub fn flip_mask(mask: Vec<bool>) -> Self {
        Transform {
            perm: (0..mask.len()).collect(),
            mask,
        }
    }

    pub fn dimension(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn apply(&self, zeta: &[bool]) -> Result<Vec<bool>> {
        if zeta.len() != self.dimension() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} settings", self.dimension()),
                found: format!("{} settings", zeta.len()),
            });
        }
        Ok(self
            .perm
            .iter()
            .zip(&self.mask)
            .map(|(&p, &m)| zeta[p] ^ m)
            .collect())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Transform) -> Result<Transform> {
        if next.dimension() != self.dimension() {
            return Err(Error::InvalidArgument("transforms act on different dimensions".into()));
        }
        let perm = next.perm.iter().map(|&j| self.perm[j]).collect();
        let mask = next
            .perm
            .iter()
            .zip(&next.mask)
            .map(|(&j, &m)| self.mask[j] ^ m)
            .collect();
        Ok(Transform { perm, mask })
    }

    pub fn inverse(&self) -> Transform {
        let d = self.dimension();
        let mut perm = vec![0; d];
        let mut mask = vec![false; d];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            mask[p] = self.mask[i];
        }
        Transform { perm, mask }
    }
}

pub fn apply_reversible(zeta: &[bool], transform: &Transform) -> Result<Vec<bool>> {
    transform.apply(zeta)
}

/// Measures setting `setting` of the vertex `zeta`. The measured coordinate
/// keeps its outcome and every other coordinate is reset to 0.
pub fn post_measurement_state(zeta: &[bool], setting: usize) -> Result<(bool, Vec<bool>)> {
    let outcome = measure_vertex(zeta, setting)?;
    let mut next = vec![false; zeta.len()];
    next[setting] = outcome;
    Ok((outcome, next))
}

/// A hypercube-bit memory together with a classical register, a clock and
/// the ledger of everything done to it.
#[derive(Debug, Clone, Serialize)]
pub struct MemoryState {
    zeta: Vec<bool>,
    register: Vec<bool>,
    clock: u64,
    ledger: Vec<LedgerEntry>,
}

impl MemoryState {
    /// The all-zeros vertex of a `d`-dimensional hypercube bit.
    pub fn new(d: usize) -> Result<Self> {
        MemoryState::from_vertex(vec![false; d])
    }

    pub fn from_vertex(zeta: Vec<bool>) -> Result<Self> {
        if zeta.is_empty() {
            return Err(Error::InvalidArgument("memory needs at least one setting".into()));
        }
        Ok(MemoryState {
            zeta,
            register: Vec::new(),
            clock: 0,
            ledger: Vec::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.zeta.len()
    }

    pub fn zeta(&self) -> &[bool] {
        &self.zeta
    }

    pub fn register(&self) -> &[bool] {
        &self.register
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn into_ledger(self) -> Vec<LedgerEntry> {
        self.ledger
    }

    pub fn total_cost(&self) -> Rational {
        self.ledger.iter().map(|e| &e.cost_bits).sum()
    }

    /// The memory as a state of `make_hypercube(D)`.
    pub fn vertex_state(&self) -> Result<State> {
        let labels: Vec<usize> = self.zeta.iter().map(|&b| b as usize).collect();
        State::deterministic(&SystemShape::binary(self.dimension())?, &labels)
    }

    fn record(&mut self, operation: Operation, cost_bits: Rational) {
        self.ledger.push(LedgerEntry {
            step: self.clock,
            operation,
            cost_bits,
        });
    }

    /// Advances the clock without touching the memory.
    pub fn tick(&mut self) {
        self.clock += 1;
    }

    pub fn flip(&mut self, coordinate: usize) -> Result<()> {
        if coordinate >= self.dimension() {
            return Err(Error::IndexOutOfRange {
                what: "coordinate",
                index: coordinate,
                limit: self.dimension(),
            });
        }
        self.zeta[coordinate] ^= true;
        self.record(Operation::Flip { coordinate }, Rational::zero());
        Ok(())
    }

    pub fn rotate(&mut self, transform: &Transform) -> Result<()> {
        self.zeta = transform.apply(&self.zeta)?;
        self.record(Operation::Rotate, Rational::zero());
        Ok(())
    }

    /// Measures one setting and copies the outcome into the register.
    pub fn measure(&mut self, setting: usize) -> Result<bool> {
        if setting >= self.dimension() {
            return Err(Error::IndexOutOfRange {
                what: "setting",
                index: setting,
                limit: self.dimension(),
            });
        }
        let (outcome, next) = post_measurement_state(&self.zeta, setting)?;
        self.zeta = next;
        self.register.push(outcome);
        self.record(Operation::Measure { setting, outcome }, Rational::zero());
        Ok(outcome)
    }

    /// Erases the classical register at one bit-unit per bit.
    pub fn erase_register(&mut self) -> Rational {
        let bits = self.register.len();
        self.register.clear();
        let cost = Rational::from_integer(bits as i64);
        self.record(Operation::EraseRegister { bits }, cost.clone());
        cost
    }

    /// Rotates back to the all-zeros vertex by flipping every set coordinate.
    pub fn reset(&mut self) {
        let undo = Transform::flip_mask(self.zeta.clone());
        self.zeta = undo.apply(&self.zeta).expect("mask matches dimension");
        self.record(Operation::Reset, Rational::zero());
    }
}

/// Measure setting 0, erase the recorded bit, rotate back to all zeros.
/// Returns the cost of the cycle.
pub fn erasure_cycle(memory: &mut MemoryState) -> Result<Rational> {
    let before = memory.total_cost();
    memory.tick();
    memory.measure(0)?;
    memory.tick();
    memory.erase_register();
    memory.tick();
    memory.reset();
    if memory.zeta().iter().any(|&b| b) {
        return Err(Error::Invariant("reset rotation missed the initial vertex".into()));
    }
    Ok(memory.total_cost() - before)
}

/// Runs the cycle on a fresh memory prepared in `zeta`.
pub fn erasure_cycle_from(zeta: &[bool]) -> Result<(Vec<LedgerEntry>, Rational)> {
    let mut m = MemoryState::from_vertex(zeta.to_vec())?;
    let cost = erasure_cycle(&mut m)?;
    Ok((m.into_ledger(), cost))
}

#[derive(Debug, Clone, Serialize)]
pub struct DemonReport {
    pub dimension: usize,
    pub decisions: BitString,
    pub stored_bits: usize,
    pub total_cost_bits: Rational,
    pub landauer_bound_bits: Rational,
    pub deficit_bits: Rational,
    pub temperature: Option<f64>,
    pub energy_joules: Option<f64>,
    pub landauer_joules: Option<f64>,
    pub ledger: Vec<LedgerEntry>,
}

/// `cost_bits * k_B T ln 2`.
pub fn bits_to_joules(cost_bits: &Rational, temperature: f64) -> f64 {
    cost_bits.to_f64() * BOLTZMANN * temperature * std::f64::consts::LN_2
}

/// Stores decisions in a fresh memory: run `k` flips coordinate `k` when the
/// decision is 1.
pub fn store_decisions(decisions: &BitString) -> Result<MemoryState> {
    if decisions.len() > MAX_MEMORY_DIMENSION {
        return Err(Error::CapExceeded {
            what: "demon memory dimension",
            requested: decisions.len() as u128,
            cap: MAX_MEMORY_DIMENSION as u128,
        });
    }
    let mut m = MemoryState::new(decisions.len())?;
    for (k, &d) in decisions.bits().iter().enumerate() {
        m.tick();
        if d {
            m.flip(k)?;
        }
    }
    if m.zeta() != decisions.bits() {
        return Err(Error::Invariant("memory does not hold the decisions".into()));
    }
    Ok(m)
}

/// Reads decision `k` (1-based) back from a fresh run before erasure.
pub fn readback(decisions: &BitString, k: usize) -> Result<bool> {
    decisions.get(k)?;
    let mut m = store_decisions(decisions)?;
    m.tick();
    m.measure(k - 1)
}

pub fn demon_protocol(decisions: &BitString, temperature: Option<f64>) -> Result<DemonReport> {
    if let Some(t) = temperature {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")));
        }
    }
    let mut m = store_decisions(decisions)?;
    let d = decisions.len();
    erasure_cycle(&mut m)?;
    let total = m.total_cost();
    let bound = Rational::from_integer(d as i64);
    Ok(DemonReport {
        dimension: d,
        decisions: decisions.clone(),
        stored_bits: d,
        deficit_bits: &bound - &total,
        energy_joules: temperature.map(|t| bits_to_joules(&total, t)),
        landauer_joules: temperature.map(|t| bits_to_joules(&bound, t)),
        total_cost_bits: total,
        landauer_bound_bits: bound,
        temperature,
        ledger: m.into_ledger(),
    })
}
