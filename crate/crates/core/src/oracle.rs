//! Black-box functions given as truth tables, the f-gate, phase kickback
//! and the classical reference predicates.
//!
//! Truth-table index convention: the input `(x_1, .., x_n)` sits at index
//! `sum x_i 2^(n-i)`, i.e. `x_1` is the most significant bit. This matches
//! the state-vector order when the input qubits are passed first-to-last.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::state::{read_bits, GateOp, QubitIndex, StateVector};

/// Largest arity accepted for explicit truth tables.
pub const MAX_ARITY: usize = 24;

/// Explicit truth table of `f : {0,1}^n -> {0,1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OracleTable {
    n: usize,
    bits: Vec<bool>,
}

impl OracleTable {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::invalid("n", format!("arity {n} exceeds {MAX_ARITY}")));
        }
        if bits.len() != 1 << n {
            return Err(Error::ArityMismatch {
                expected: 1 << n,
                actual: bits.len(),
            });
        }
        Ok(OracleTable { n, bits })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::invalid("n", format!("arity {n} exceeds {MAX_ARITY}")));
        }
        Ok(OracleTable {
            n,
            bits: (0..1usize << n).map(f).collect(),
        })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    /// Table whose `index`-th entry is bit `index` of `code`, read as the
    /// `2^n`-character string `code` in binary with entry 0 first.
    pub fn from_code(n: usize, code: u64) -> Result<Self> {
        let len = 1usize << n;
        if len > 64 {
            return Err(Error::invalid("n", "truth-table codes cover n <= 6"));
        }
        Self::from_fn(n, |x| code >> (len - 1 - x) & 1 == 1)
    }

    /// Parses `"0110"`-style strings; the length fixes `n`.
    pub fn from_bit_str(bits: &str) -> Result<Self> {
        let len = bits.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Parse(format!("bit string length {len} is not a power of two")));
        }
        let parsed = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(len.trailing_zeros() as usize, parsed)
    }

    /// Uniformly random table.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::invalid("n", format!("arity {n} exceeds {MAX_ARITY}")));
        }
        let bits = (0..1usize << n).map(|_| rng.gen()).collect();
        Self::new(n, bits)
    }

    /// Uniformly random table with exactly `weight` ones.
    pub fn random_with_weight<R: Rng + ?Sized>(n: usize, weight: usize, rng: &mut R) -> Result<Self> {
        let len = 1usize << n;
        if weight > len {
            return Err(Error::invalid("weight", format!("{weight} > 2^{n}")));
        }
        let mut bits = vec![false; len];
        for b in bits.iter_mut().take(weight) {
            *b = true;
        }
        bits.shuffle(rng);
        Self::new(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of satisfying inputs.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn negated(&self) -> Self {
        OracleTable {
            n: self.n,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    /// Integer value of the table as a bit string (entry 0 most significant).
    pub fn code(&self) -> usize {
        self.bits.iter().fold(0, |acc, b| (acc << 1) | usize::from(*b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&OracleFile {
            n: self.n,
            bits: self.to_bit_string(),
        })
        .expect("oracle file serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: OracleFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let table = Self::from_bit_str(&file.bits)?;
        if table.n != file.n {
            return Err(Error::ArityMismatch {
                expected: 1 << file.n,
                actual: file.bits.len(),
            });
        }
        Ok(table)
    }
}

impl fmt::Debug for OracleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleTable(n={}, {})", self.n, self.to_bit_string())
    }
}

/// On-disk oracle format: `{"n": 2, "bits": "0110"}`.
#[derive(Serialize, Deserialize)]
struct OracleFile {
    n: usize,
    bits: String,
}

/// Number of black-box accesses made during a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct QueryCounter(u64);

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, calls: u64) {
        self.0 += calls;
    }

    pub fn count(&self) -> u64 {
        self.0
    }
}

/// Pointwise combiner `L : {0,1} x {0,1} -> {0,1}` given by its table
/// `[L(0,0), L(0,1), L(1,0), L(1,1)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Combiner(pub [bool; 4]);

impl Combiner {
    pub const AND: Combiner = Combiner([false, false, false, true]);
    pub const OR: Combiner = Combiner([false, true, true, true]);
    pub const XOR: Combiner = Combiner([false, true, true, false]);

    pub fn apply(&self, a: bool, b: bool) -> bool {
        self.0[(usize::from(a) << 1) | usize::from(b)]
    }

    /// All sixteen binary combiners.
    pub fn all() -> impl Iterator<Item = Combiner> {
        (0u8..16).map(|code| Combiner([code & 8 != 0, code & 4 != 0, code & 2 != 0, code & 1 != 0]))
    }

    pub fn name(&self) -> String {
        match *self {
            Combiner::AND => "and".into(),
            Combiner::OR => "or".into(),
            Combiner::XOR => "xor".into(),
            Combiner(t) => t.iter().map(|b| if *b { '1' } else { '0' }).collect(),
        }
    }
}

impl std::str::FromStr for Combiner {
    type Err = Error;

    /// `and`, `or`, `xor`, or the four table bits `L(0,0) L(0,1) L(1,0) L(1,1)`.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Combiner::AND),
            "or" => Ok(Combiner::OR),
            "xor" => Ok(Combiner::XOR),
            t if t.len() == 4 && t.chars().all(|c| c == '0' || c == '1') => {
                let b: Vec<bool> = t.chars().map(|c| c == '1').collect();
                Ok(Combiner([b[0], b[1], b[2], b[3]]))
            }
            other => Err(Error::Parse(format!("unknown combiner {other:?}"))),
        }
    }
}

/// `L(g, h)(x) = L(g(x), h(x))`.
pub fn pointwise_combine(l: Combiner, g: &OracleTable, h: &OracleTable) -> Result<OracleTable> {
    if g.n != h.n {
        return Err(Error::ArityMismatch {
            expected: g.n,
            actual: h.n,
        });
    }
    OracleTable::from_fn(g.n, |x| l.apply(g.get(x), h.get(x)))
}

fn check_oracle_wires(state: &StateVector, f: &OracleTable, inputs: &[QubitIndex], output: QubitIndex) -> Result<()> {
    if inputs.len() != f.n {
        return Err(Error::ArityMismatch {
            expected: f.n,
            actual: inputs.len(),
        });
    }
    let mut all = inputs.to_vec();
    all.push(output);
    state.check_qubits(&all)
}

/// The f-gate `|x>|y> -> |x>|f(x) xor y>`; one query.
pub fn apply_f_gate(
    state: &mut StateVector,
    f: &OracleTable,
    inputs: &[QubitIndex],
    output: QubitIndex,
    counter: &mut QueryCounter,
) -> Result<()> {
    check_oracle_wires(state, f, inputs, output)?;
    let exec = Execution::auto(state.amplitudes().len());
    let width = state.num_qubits();
    state.flip_if(output, exec, |i| f.get(read_bits(width, i, inputs)));
    counter.charge(1);
    Ok(())
}

/// `|x> -> (-1)^f(x) |x>` realised by an f-gate on `ancilla` prepared in
/// `(|0> - |1>)/sqrt 2`. The ancilla starts and ends in `|0>`; one query.
pub fn apply_phase_oracle(
    state: &mut StateVector,
    f: &OracleTable,
    inputs: &[QubitIndex],
    ancilla: QubitIndex,
    counter: &mut QueryCounter,
) -> Result<()> {
    check_oracle_wires(state, f, inputs, ancilla)?;
    state.apply(&GateOp::x(ancilla.0))?;
    state.apply(&GateOp::h(ancilla.0))?;
    apply_f_gate(state, f, inputs, ancilla, counter)?;
    state.apply(&GateOp::h(ancilla.0))?;
    state.apply(&GateOp::x(ancilla.0))
}

/// Classical predicates evaluated by full enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Or,
    And,
    Parity,
    Majority,
    /// Deutsch-Jozsa promise problem: 0 for constant zero, 1 for balanced.
    Bal,
    /// Alternating quantifiers starting with an OR block of the given widths.
    Sigma(Vec<usize>),
    /// Negation of `Sigma`: alternation starting with an AND block.
    Pi(Vec<usize>),
}

/// Evaluates `p` on `f`. `Ok(None)` means `f` lies outside the promise
/// (only possible for [`Predicate::Bal`]).
pub fn classical_predicate(p: &Predicate, f: &OracleTable) -> Result<Option<bool>> {
    let bits = f.bits();
    Ok(Some(match p {
        Predicate::Or => bits.iter().any(|b| *b),
        Predicate::And => bits.iter().all(|b| *b),
        Predicate::Parity => bits.iter().fold(false, |acc, b| acc ^ b),
        Predicate::Majority => 2 * f.weight() > f.len(),
        Predicate::Bal => {
            let w = f.weight();
            if w == 0 {
                false
            } else if 2 * w == f.len() {
                true
            } else {
                return Ok(None);
            }
        }
        Predicate::Sigma(widths) => {
            check_widths(widths, f.n)?;
            quantify(f, widths, 0, 0, true)
        }
        Predicate::Pi(widths) => {
            check_widths(widths, f.n)?;
            quantify(f, widths, 0, 0, false)
        }
    }))
}

pub(crate) fn check_widths(widths: &[usize], n: usize) -> Result<()> {
    if widths.is_empty() {
        return Err(Error::invalid("widths", "at least one quantifier block is required"));
    }
    let total: usize = widths.iter().sum();
    if total != n {
        return Err(Error::invalid(
            "widths",
            format!("quantifier widths {widths:?} sum to {total}, expected n = {n}"),
        ));
    }
    Ok(())
}

fn quantify(f: &OracleTable, widths: &[usize], level: usize, prefix: usize, exists: bool) -> bool {
    if level == widths.len() {
        return f.get(prefix);
    }
    let w = widths[level];
    let mut branch = (0..1usize << w).map(|s| quantify(f, widths, level + 1, (prefix << w) | s, !exists));
    if exists {
        branch.any(|v| v)
    } else {
        branch.all(|v| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{qubits, TOLERANCE};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> OracleTable {
        OracleTable::from_bit_str(s).unwrap()
    }

    /// Dense permutation matrix of the f-gate on inputs 0..n, output n.
    fn f_gate_matrix(f: &OracleTable) -> Vec<Vec<f64>> {
        let dim = 1 << (f.n() + 1);
        let mut m = vec![vec![0.0; dim]; dim];
        for x in 0..1 << f.n() {
            for y in 0..2 {
                let col = (x << 1) | y;
                let row = (x << 1) | (y ^ usize::from(f.get(x)));
                m[row][col] = 1.0;
            }
        }
        m
    }

    fn mat_vec(m: &[Vec<f64>], v: &[Complex64]) -> Vec<Complex64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| b * *a).sum())
            .collect()
    }

    #[test]
    fn zero_function_gate_is_identity() {
        let f = OracleTable::constant(2, false).unwrap();
        let start = StateVector::random(3, 5).unwrap();
        let mut s = start.clone();
        let mut c = QueryCounter::new();
        apply_f_gate(&mut s, &f, &qubits([0, 1]), QubitIndex(2), &mut c).unwrap();
        assert!(s.distance(&start).unwrap() < TOLERANCE);
        assert_eq!(c.count(), 1);
    }

    #[test]
    fn f_gate_writes_value() {
        let f = t("0010"); // f(10) = 1
        let mut s = StateVector::basis(3, 0b100).unwrap();
        let mut c = QueryCounter::new();
        apply_f_gate(&mut s, &f, &qubits([0, 1]), QubitIndex(2), &mut c).unwrap();
        assert!((s.probability(0b101) - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn f_gate_matches_permutation_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            for _ in 0..5 {
                let f = OracleTable::random(n, &mut rng).unwrap();
                let mut s = StateVector::new(n + 1).unwrap();
                for q in 0..n {
                    s.apply(&GateOp::h(q)).unwrap();
                }
                let expected = mat_vec(&f_gate_matrix(&f), s.amplitudes());
                let inputs: Vec<_> = qubits(0..n);
                apply_f_gate(&mut s, &f, &inputs, QubitIndex(n), &mut QueryCounter::new()).unwrap();
                let exp = StateVector::from_amplitudes(expected).unwrap();
                assert!(s.distance(&exp).unwrap() < TOLERANCE);
            }
        }
    }

    #[test]
    fn phase_oracle_examples() {
        let f0 = OracleTable::constant(2, false).unwrap();
        let f1 = OracleTable::constant(2, true).unwrap();
        let start = StateVector::random(3, 9).unwrap();
        let inputs = qubits([0, 1]);
        // random states have a nonzero ancilla component; use |psi>|0>
        let mut s = StateVector::new(3).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::single(1, crate::state::Matrix2::ry(0.4))).unwrap();
        let before = s.clone();
        let mut c = QueryCounter::new();
        apply_phase_oracle(&mut s, &f0, &inputs, QubitIndex(2), &mut c).unwrap();
        assert!(s.distance(&before).unwrap() < TOLERANCE);
        apply_phase_oracle(&mut s, &f1, &inputs, QubitIndex(2), &mut c).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a + b).norm() < TOLERANCE);
        }
        assert_eq!(c.count(), 2);
        let _ = start;

        // f(11) = 1 on a uniform input negates exactly |11>.
        let f = t("0001");
        let mut u = StateVector::new(3).unwrap();
        u.apply(&GateOp::h(0)).unwrap();
        u.apply(&GateOp::h(1)).unwrap();
        let expected: Vec<f64> = (0..4).map(|x| if f.get(x) { -0.5 } else { 0.5 }).collect();
        apply_phase_oracle(&mut u, &f, &inputs, QubitIndex(2), &mut QueryCounter::new()).unwrap();
        for (x, e) in expected.iter().enumerate() {
            assert!((u.amplitude(x << 1).re - e).abs() < TOLERANCE);
            assert!(u.amplitude((x << 1) | 1).norm() < TOLERANCE);
        }
    }

    #[test]
    fn combiner_examples() {
        let g = t("0110");
        let ones = OracleTable::constant(2, true).unwrap();
        assert_eq!(pointwise_combine(Combiner::AND, &g, &ones).unwrap(), g);
        assert_eq!(
            pointwise_combine(Combiner::XOR, &g, &g).unwrap(),
            OracleTable::constant(2, false).unwrap()
        );
        assert_eq!(pointwise_combine(Combiner::AND, &g, &t("1100")).unwrap(), t("0100"));
        assert!(pointwise_combine(Combiner::AND, &g, &t("01")).is_err());
    }

    #[test]
    fn combine_is_pointwise_exhaustive() {
        for n in 0..=2 {
            let len = 1u64 << (1 << n);
            for gc in 0..len {
                for hc in 0..len {
                    let g = OracleTable::from_code(n, gc).unwrap();
                    let h = OracleTable::from_code(n, hc).unwrap();
                    for l in Combiner::all() {
                        let c = pointwise_combine(l, &g, &h).unwrap();
                        for x in 0..1 << n {
                            assert_eq!(c.get(x), l.apply(g.get(x), h.get(x)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn predicate_examples() {
        let p = |pred: Predicate, s: &str| classical_predicate(&pred, &t(s)).unwrap();
        assert_eq!(p(Predicate::Or, "0000"), Some(false));
        assert_eq!(p(Predicate::Majority, "1110"), Some(true));
        assert_eq!(p(Predicate::Majority, "1100"), Some(false));
        assert_eq!(p(Predicate::Parity, "1110"), Some(true));
        assert_eq!(p(Predicate::Bal, "0000"), Some(false));
        assert_eq!(p(Predicate::Bal, "0101"), Some(true));
        assert_eq!(p(Predicate::Bal, "0111"), None);
        // f(0,0)=1, f(0,1)=1, f(1,0)=0, f(1,1)=1
        assert_eq!(p(Predicate::Sigma(vec![1, 1]), "1101"), Some(true));
        assert_eq!(p(Predicate::Sigma(vec![1, 1]), "1001"), Some(false));
        assert_eq!(p(Predicate::Pi(vec![1, 1]), "1001"), Some(true));
        assert!(classical_predicate(&Predicate::Sigma(vec![1, 2]), &t("1101")).is_err());
    }

    #[test]
    fn sigma_one_is_or_and_pi_is_de_morgan() {
        for n in 0..=3 {
            for code in 0..1u64 << (1 << n) {
                let f = OracleTable::from_code(n, code).unwrap();
                let or = classical_predicate(&Predicate::Or, &f).unwrap();
                assert_eq!(classical_predicate(&Predicate::Sigma(vec![n]), &f).unwrap(), or);
                if n >= 1 {
                    for m in 0..=n {
                        let w = vec![n - m, m];
                        let sigma = classical_predicate(&Predicate::Sigma(w.clone()), &f.negated()).unwrap();
                        let pi = classical_predicate(&Predicate::Pi(w), &f).unwrap();
                        assert_eq!(pi, sigma.map(|v| !v));
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_rejects_whitespace() {
        let f = t("0110");
        let text = f.to_json();
        assert_eq!(text, r#"{"n":2,"bits":"0110"}"#);
        assert_eq!(OracleTable::from_json(&text).unwrap(), f);
        assert!(OracleTable::from_json(r#"{"n":2,"bits":"01 0"}"#).is_err());
        assert!(OracleTable::from_json(r#"{"n":3,"bits":"0110"}"#).is_err());
    }
}
