//! Communication tasks on hypercube bits, simulated exactly by enumerating
//! every input and every hidden outcome.
//!
//! Bit positions are 1-based at the API surface (`b_1 ... b_n`) and 0-based
//! internally. When a bit string is read as an integer, `b_1` is the most
//! significant bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::composition::{pr_box, BoxCorrelationLabel};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::system::{Measurement, State, SystemShape};

/// The measurement dimension of every hypercube bit. Certified exhaustively
/// by the dimensions module for small `D`.
pub const HYPERCUBE_MEASUREMENT_DIMENSION: usize = 2;

/// Largest hypercube dimension the PR-box translator will enumerate.
pub const MAX_TRANSLATOR_DIMENSION: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidArgument("bit string must not be empty".into()));
        }
        Ok(BitString { bits })
    }

    /// The `len`-bit string whose integer value is `value`.
    pub fn from_index(value: usize, len: usize) -> Result<Self> {
        if len < usize::BITS as usize && value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "{value} does not fit in {len} bits"
            )));
        }
        BitString::new((0..len).map(|i| value >> (len - 1 - i) & 1 == 1).collect())
    }

    pub fn zeros(len: usize) -> Result<Self> {
        BitString::new(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `b_k`, 1-based.
    pub fn get(&self, k: usize) -> Result<bool> {
        check_index(k, self.len())?;
        Ok(self.bits[k - 1])
    }

    pub fn to_index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
    }

    /// Every string of length `len`, in increasing integer order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << len).map(move |v| BitString::from_index(v, len).expect("in range"))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "malformed bit string {s:?}: unexpected {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitString::new(bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_index(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "bit index",
            index: k,
            limit: n,
        });
    }
    Ok(())
}

/// Boolean function `f(b, c)` with `b` of `n_alice` bits and `c` of `n_bob`
/// bits; `values[b * 2^n_bob + c]`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    n_alice: usize,
    n_bob: usize,
    values: Vec<bool>,
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}x{})", self.n_alice, self.n_bob)
    }
}

impl TruthTable {
    pub fn new(n_alice: usize, n_bob: usize, values: Vec<bool>) -> Result<Self> {
        if n_alice >= 32 || n_bob >= 32 {
            return Err(Error::InvalidArgument("input widths must be below 32 bits".into()));
        }
        let expected = 1usize << (n_alice + n_bob);
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "truth table over {n_alice}+{n_bob} bits needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(TruthTable {
            n_alice,
            n_bob,
            values,
        })
    }

    pub fn from_fn(n_alice: usize, n_bob: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let cols = 1usize << n_bob;
        let values = (0..1usize << (n_alice + n_bob))
            .map(|i| f(i / cols, i % cols))
            .collect();
        TruthTable::new(n_alice, n_bob, values)
    }

    /// `b . c mod 2` on `n`-bit inputs.
    pub fn inner_product(n: usize) -> Result<Self> {
        TruthTable::from_fn(n, n, |b, c| (b & c).count_ones() % 2 == 1)
    }

    pub fn equality(n: usize) -> Result<Self> {
        TruthTable::from_fn(n, n, |b, c| b == c)
    }

    pub fn constant(n_alice: usize, n_bob: usize, value: bool) -> Result<Self> {
        TruthTable::from_fn(n_alice, n_bob, |_, _| value)
    }

    /// `b_1 XOR c_1`; reduces to `b_1` when Bob has no input.
    pub fn xor_first_bits(n_alice: usize, n_bob: usize) -> Result<Self> {
        if n_alice == 0 {
            return Err(Error::InvalidArgument("Alice needs at least one bit".into()));
        }
        TruthTable::from_fn(n_alice, n_bob, |b, c| {
            let b1 = b >> (n_alice - 1) & 1 == 1;
            let c1 = n_bob > 0 && c >> (n_bob - 1) & 1 == 1;
            b1 ^ c1
        })
    }

    pub fn random(n_alice: usize, n_bob: usize, rng: &mut impl Rng) -> Result<Self> {
        let values = (0..1usize << (n_alice + n_bob)).map(|_| rng.gen()).collect();
        TruthTable::new(n_alice, n_bob, values)
    }

    pub fn n_alice(&self) -> usize {
        self.n_alice
    }

    pub fn n_bob(&self) -> usize {
        self.n_bob
    }

    pub fn rows(&self) -> usize {
        1 << self.n_alice
    }

    pub fn columns(&self) -> usize {
        1 << self.n_bob
    }

    pub fn value(&self, b: usize, c: usize) -> bool {
        self.values[b * self.columns() + c]
    }

    /// Row `f(b, .)`.
    pub fn row(&self, b: usize) -> &[bool] {
        let cols = self.columns();
        &self.values[b * cols..(b + 1) * cols]
    }

    /// Text form: `"n_alice n_bob"`, then one line of `0`/`1` per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_alice, self.n_bob);
        for b in 0..self.rows() {
            out.extend(self.row(b).iter().map(|&v| if v { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, column: usize, message: String| Error::Parse {
            line: line + 1,
            column: column + 1,
            message,
        };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(0, 0, "empty truth table".into()))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(perr(hl, 0, "header must be \"n_alice n_bob\"".into()));
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v < 32)
                .ok_or_else(|| perr(hl, header.find(s).unwrap_or(0), format!("bad input width {s:?}")))
        };
        let (n_alice, n_bob) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let cols = 1usize << n_bob;
        let mut values = Vec::new();
        let mut rows = 0;
        for (ln, line) in lines {
            let line = line.trim_end();
            let lead = line.len() - line.trim_start().len();
            let body = line.trim_start();
            if rows == 1usize << n_alice {
                return Err(perr(ln, lead, format!("more than {} rows", 1usize << n_alice)));
            }
            if body.chars().count() != cols {
                return Err(perr(
                    ln,
                    lead,
                    format!("row has {} entries, expected {cols}", body.chars().count()),
                ));
            }
            for (col, ch) in body.chars().enumerate() {
                values.push(match ch {
                    '0' => false,
                    '1' => true,
                    other => return Err(perr(ln, lead + col, format!("unexpected {other:?}"))),
                });
            }
            rows += 1;
        }
        if rows != 1usize << n_alice {
            return Err(perr(
                text.lines().count(),
                0,
                format!("expected {} rows, found {rows}", 1usize << n_alice),
            ));
        }
        TruthTable::new(n_alice, n_bob, values)
    }
}

/// One step of a protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    Prepare { zeta: BitString },
    Transmit { dimension: usize },
    Measure { setting: usize, outcome: bool },
    Output { bit: bool },
}

/// Record of one run: Alice prepares `zeta`, Bob measures setting `k`
/// (1-based) on the received hypercube bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtocolTranscript {
    pub prepared: BitString,
    pub setting: usize,
    pub outcome: bool,
    pub message_bits: Vec<bool>,
    pub steps: Vec<Step>,
}

impl ProtocolTranscript {
    /// Re-executes the measurement and checks it reproduces the outcome.
    pub fn replay(&self) -> Result<bool> {
        let outcome = measure_vertex(self.prepared.bits(), self.setting - 1)?;
        if outcome != self.outcome {
            return Err(Error::Invariant(format!(
                "replay of setting {} on {} gave {outcome}, transcript says {}",
                self.setting, self.prepared, self.outcome
            )));
        }
        Ok(outcome)
    }
}

/// Outcome of measuring setting `x` (0-based) on the hypercube vertex `zeta`,
/// computed from the measurement's exact outcome probabilities.
pub fn measure_vertex(zeta: &[bool], x: usize) -> Result<bool> {
    let dist = outcome_distribution(zeta, x)?;
    if dist[1].is_one() {
        Ok(true)
    } else if dist[0].is_one() {
        Ok(false)
    } else {
        Err(Error::Invariant(format!("setting {x} is not deterministic on a vertex")))
    }
}

/// `[P(0), P(1)]` for setting `x` on the vertex `zeta`.
pub fn outcome_distribution(zeta: &[bool], x: usize) -> Result<[Rational; 2]> {
    let shape = SystemShape::binary(zeta.len())?;
    let labels: Vec<usize> = zeta.iter().map(|&b| b as usize).collect();
    let state = State::deterministic(&shape, &labels)?;
    if x >= zeta.len() {
        return Err(Error::IndexOutOfRange {
            what: "setting",
            index: x,
            limit: zeta.len(),
        });
    }
    let p = Measurement::setting(&shape, x)?.probabilities(&state)?;
    Ok([p[0].clone(), p[1].clone()])
}

/// Bob retrieves `b_k` from a hypercube bit of dimension `n` prepared in `zeta = b`.
pub fn index_protocol(b: &BitString, k: usize) -> Result<(bool, ProtocolTranscript)> {
    check_index(k, b.len())?;
    let outcome = measure_vertex(b.bits(), k - 1)?;
    let transcript = ProtocolTranscript {
        prepared: b.clone(),
        setting: k,
        outcome,
        message_bits: Vec::new(),
        steps: vec![
            Step::Prepare { zeta: b.clone() },
            Step::Transmit { dimension: b.len() },
            Step::Measure {
                setting: k,
                outcome,
            },
            Step::Output { bit: outcome },
        ],
    };
    Ok((outcome, transcript))
}

/// `log2 d`.
pub fn entropy_capacity(d_m: usize) -> Result<f64> {
    if d_m < 2 {
        return Err(Error::InvalidArgument(format!("capacity needs d_m >= 2, got {d_m}")));
    }
    Ok((d_m as f64).log2())
}

/// Mutual information in bits of a joint distribution `joint[a][b]`.
pub fn mutual_information(joint: &[Vec<Rational>]) -> Result<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    if joint.is_empty() || cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("joint distribution must be a nonempty rectangle".into()));
    }
    if joint.iter().flatten().any(Rational::is_negative) {
        return Err(Error::InvalidArgument("joint distribution has a negative entry".into()));
    }
    let total: Rational = joint.iter().flatten().sum();
    if !total.is_one() {
        return Err(Error::InvalidArgument(format!("joint distribution sums to {total}")));
    }
    let row: Vec<Rational> = joint.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<Rational> = (0..cols).map(|c| joint.iter().map(|r| &r[c]).sum()).collect();
    let mut info = 0.0;
    for (a, r) in joint.iter().enumerate() {
        for (b, p) in r.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let ratio = p / (&row[a] * &col[b]);
            info += p.to_f64() * ratio.to_f64().log2();
        }
    }
    Ok(info)
}

#[derive(Debug, Clone, Serialize)]
pub struct IcReport {
    pub n: usize,
    /// `I(b_j : beta | k = j)` for `j = 1..n`.
    pub per_index: Vec<f64>,
    pub total: f64,
    pub capacity: f64,
    pub violated: bool,
}

/// Exact information-causality quantity of a one-shot protocol: the guess
/// distribution `guess(b, k)` (k 1-based) under uniform `b`.
pub fn ic_quantity_with(
    n: usize,
    capacity: f64,
    guess: impl Fn(&BitString, usize) -> Result<[Rational; 2]> + Sync,
) -> Result<IcReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n >= 24 {
        return Err(Error::CapExceeded {
            what: "information-causality string length",
            requested: n as u128,
            cap: 23,
        });
    }
    let weight = Rational::inverse_power_of_two(n as u32);
    let per_index = (1..=n)
        .into_par_iter()
        .map(|j| {
            let mut joint = vec![vec![Rational::zero(); 2]; 2];
            for b in BitString::all(n) {
                let dist = guess(&b, j)?;
                let bj = b.get(j)? as usize;
                for (beta, p) in dist.iter().enumerate() {
                    if !p.is_zero() {
                        joint[bj][beta] += &weight * p;
                    }
                }
            }
            mutual_information(&joint)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total = per_index.iter().sum();
    Ok(IcReport {
        n,
        per_index,
        total,
        capacity,
        violated: total > capacity,
    })
}

/// Information-causality quantity of the hypercube index protocol.
pub fn ic_quantity(n: usize) -> Result<IcReport> {
    ic_quantity_with(n, entropy_capacity(HYPERCUBE_MEASUREMENT_DIMENSION)?, |b, k| {
        outcome_distribution(b.bits(), k - 1)
    })
}

/// Same task with a classical bit carrying `b_1`; Bob outputs it whatever `k` is.
pub fn ic_quantity_classical_bit(n: usize) -> Result<IcReport> {
    ic_quantity_with(n, entropy_capacity(2)?, |b, _| outcome_distribution(&b.bits()[..1], 0))
}

#[derive(Debug, Clone, Copy)]
pub struct CcLimits {
    pub max_alice_bits: usize,
    pub max_bob_bits: usize,
}

impl Default for CcLimits {
    fn default() -> Self {
        CcLimits {
            max_alice_bits: 12,
            max_bob_bits: 12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CcReport {
    pub n_alice: usize,
    pub n_bob: usize,
    /// Hypercube dimension `D = 2^n_bob`.
    pub dimension: usize,
    pub pairs: usize,
    pub correct: usize,
    pub correct_fraction: Rational,
    pub communication_bits: f64,
}

/// Alice sends `zeta_i = f(b, i)` on a hypercube bit of dimension `|Y|`;
/// Bob measures setting `c`. Every pair `(b, c)` is simulated.
pub fn cc_protocol(f: &TruthTable, limits: &CcLimits) -> Result<CcReport> {
    if f.n_alice() > limits.max_alice_bits || f.n_bob() > limits.max_bob_bits {
        return Err(Error::CapExceeded {
            what: "truth table input bits",
            requested: (f.n_alice() + f.n_bob()) as u128,
            cap: (limits.max_alice_bits + limits.max_bob_bits) as u128,
        });
    }
    let correct = (0..f.rows())
        .into_par_iter()
        .map(|b| -> Result<usize> {
            let mut ok = 0;
            for c in 0..f.columns() {
                if simulate_prboxes_with_hypercube(f, b, c)? == f.value(b, c) {
                    ok += 1;
                }
            }
            Ok(ok)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let pairs = f.rows() * f.columns();
    Ok(CcReport {
        n_alice: f.n_alice(),
        n_bob: f.n_bob(),
        dimension: f.columns(),
        pairs,
        correct,
        correct_fraction: Rational::from_integer(correct as i64) / Rational::from_integer(pairs as i64),
        communication_bits: entropy_capacity(HYPERCUBE_MEASUREMENT_DIMENSION)?,
    })
}

/// Bob's output for inputs `b` (row) and `c` (column): the outcome of
/// setting `c` on the vertex `zeta_i = f(b, i)`.
pub fn simulate_prboxes_with_hypercube(f: &TruthTable, b: usize, c: usize) -> Result<bool> {
    if b >= f.rows() || c >= f.columns() {
        return Err(Error::InvalidArgument(format!(
            "inputs ({b}, {c}) outside a {}x{} table",
            f.rows(),
            f.columns()
        )));
    }
    measure_vertex(f.row(b), c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrBoxSimulation {
    pub zeta: BitString,
    pub k: usize,
    /// `[P(output = 0), P(output = 1)]`.
    pub distribution: [Rational; 2],
    /// Joint outcome assignments of nonzero probability.
    pub assignments: usize,
    pub message_bits: usize,
}

impl PrBoxSimulation {
    pub fn point_mass(&self) -> Option<bool> {
        if self.distribution[1].is_one() {
            Some(true)
        } else if self.distribution[0].is_one() {
            Some(false)
        } else {
            None
        }
    }
}

/// Alice inputs `zeta_i` into PR box `i`, Bob inputs `1` into box `k` only.
/// Alice sends `c = XOR a_i`; Bob outputs `c XOR b_1 ... XOR b_D`.
pub fn simulate_hypercube_with_prboxes(zeta: &BitString, k: usize) -> Result<PrBoxSimulation> {
    let d = zeta.len();
    check_index(k, d)?;
    if d > MAX_TRANSLATOR_DIMENSION {
        return Err(Error::CapExceeded {
            what: "PR boxes in translator",
            requested: d as u128,
            cap: MAX_TRANSLATOR_DIMENSION as u128,
        });
    }
    let pr = pr_box(BoxCorrelationLabel {
        alpha: true,
        beta: false,
        gamma: false,
        delta: false,
    });
    // Nonzero (a_i, b_i, probability) per box given its inputs.
    let per_box: Vec<Vec<(bool, bool, Rational)>> = (0..d)
        .map(|i| {
            let x = zeta.bits()[i] as usize;
            let y = (i + 1 == k) as usize;
            (0..4)
                .filter_map(|ab| {
                    let p = pr.prob(x << 1 | y, ab);
                    (!p.is_zero()).then(|| (ab & 2 != 0, ab & 1 != 0, p.clone()))
                })
                .collect()
        })
        .collect();
    let mut distribution = [Rational::zero(), Rational::zero()];
    let mut assignments = 0;
    let mut choice = vec![0usize; d];
    loop {
        let mut p = Rational::one();
        let mut message = false;
        let mut bob = false;
        for (i, &c) in choice.iter().enumerate() {
            let (a, b, ref q) = per_box[i][c];
            p *= q;
            message ^= a;
            bob ^= b;
        }
        distribution[(message ^ bob) as usize] += p;
        assignments += 1;
        let mut i = 0;
        while i < d {
            choice[i] += 1;
            if choice[i] < per_box[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    Ok(PrBoxSimulation {
        zeta: zeta.clone(),
        k,
        distribution,
        assignments,
        message_bits: 1,
    })
}
