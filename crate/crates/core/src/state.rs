//! Dense state vectors and the local gate set.
//!
//! Qubit `0` is the most significant bit of an amplitude index: in an
//! `m`-qubit register, qubit `q` is bit `m - 1 - q`. Every other module
//! (truth tables, outcome strings, register layouts) uses the same order.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Default register cap: 2^26 amplitudes of 16 bytes is 1 GiB.
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Tolerance used for unitarity and normalisation checks.
pub const TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Position of a qubit within a register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitIndex(pub usize);

impl From<usize> for QubitIndex {
    fn from(q: usize) -> Self {
        QubitIndex(q)
    }
}

impl fmt::Display for QubitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Converts a list of raw indices.
pub fn qubits(indices: impl IntoIterator<Item = usize>) -> Vec<QubitIndex> {
    indices.into_iter().map(QubitIndex).collect()
}

/// A 2x2 complex matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub fn real(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Matrix2([
            [Complex64::new(m00, 0.0), Complex64::new(m01, 0.0)],
            [Complex64::new(m10, 0.0), Complex64::new(m11, 0.0)],
        ])
    }

    pub fn hadamard() -> Self {
        Self::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2)
    }

    pub fn pauli_x() -> Self {
        Self::real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_z() -> Self {
        Self::real(1.0, 0.0, 0.0, -1.0)
    }

    /// Rotation `exp(-i theta Y / 2)`, handy for building test circuits.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::real(c, -s, s, c)
    }

    /// Phase gate `diag(1, e^{i phi})`.
    pub fn phase(phi: f64) -> Self {
        Matrix2([[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, phi)]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Matrix2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }

    /// Largest entrywise deviation of `U U^dagger` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.mul(&self.adjoint());
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { ONE } else { ZERO };
                dev = dev.max((p.0[i][j] - expect).norm());
            }
        }
        dev
    }
}

/// One step of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    /// Arbitrary single-qubit unitary.
    Single { target: QubitIndex, matrix: Matrix2 },
    Cnot { control: QubitIndex, target: QubitIndex },
    /// Multi-controlled NOT; each control fires on the given bit value.
    Mcx {
        controls: Vec<(QubitIndex, bool)>,
        target: QubitIndex,
    },
    /// `2|0..0><0..0| - I` on the listed qubits.
    ReflectZero { qubits: Vec<QubitIndex> },
    /// Black-box call `|x>|y> -> |x>|f(x) xor y>`; resolved by an oracle backend.
    Oracle {
        inputs: Vec<QubitIndex>,
        output: QubitIndex,
    },
    /// Inverse of a sub-circuit.
    Adjoint(Vec<GateOp>),
}

impl GateOp {
    pub fn h(q: usize) -> Self {
        GateOp::Single {
            target: QubitIndex(q),
            matrix: Matrix2::hadamard(),
        }
    }

    pub fn x(q: usize) -> Self {
        GateOp::Single {
            target: QubitIndex(q),
            matrix: Matrix2::pauli_x(),
        }
    }

    pub fn single(q: usize, matrix: Matrix2) -> Self {
        GateOp::Single {
            target: QubitIndex(q),
            matrix,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        GateOp::Cnot {
            control: QubitIndex(control),
            target: QubitIndex(target),
        }
    }

    pub fn oracle(inputs: &[usize], output: usize) -> Self {
        GateOp::Oracle {
            inputs: qubits(inputs.iter().copied()),
            output: QubitIndex(output),
        }
    }

    /// Every qubit the operation reads or writes.
    pub fn touched(&self) -> Vec<QubitIndex> {
        match self {
            GateOp::Single { target, .. } => vec![*target],
            GateOp::Cnot { control, target } => vec![*control, *target],
            GateOp::Mcx { controls, target } => controls
                .iter()
                .map(|(q, _)| *q)
                .chain(std::iter::once(*target))
                .collect(),
            GateOp::ReflectZero { qubits } => qubits.clone(),
            GateOp::Oracle { inputs, output } => {
                inputs.iter().copied().chain(std::iter::once(*output)).collect()
            }
            GateOp::Adjoint(ops) => {
                let mut all: Vec<_> = ops.iter().flat_map(GateOp::touched).collect();
                all.sort();
                all.dedup();
                all
            }
        }
    }

    /// The inverse operation.
    pub fn adjoint(&self) -> GateOp {
        match self {
            GateOp::Single { target, matrix } => GateOp::Single {
                target: *target,
                matrix: matrix.adjoint(),
            },
            GateOp::Adjoint(ops) => GateOp::Adjoint(adjoint_circuit(ops)),
            // CNOT, MCX, zero reflections and f-gates are involutions.
            other => other.clone(),
        }
    }

    /// Number of oracle calls in this operation, counting nested adjoints.
    pub fn oracle_calls(&self) -> usize {
        match self {
            GateOp::Oracle { .. } => 1,
            GateOp::Adjoint(ops) => ops.iter().map(GateOp::oracle_calls).sum(),
            _ => 0,
        }
    }
}

/// Inverse gates in reverse order.
pub fn adjoint_circuit(ops: &[GateOp]) -> Vec<GateOp> {
    ops.iter().rev().map(GateOp::adjoint).collect()
}

/// Dense amplitude array over `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0..0>` on `num_qubits` qubits under the default cap.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        Self::basis_with_cap(num_qubits, 0, cap)
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(num_qubits, index, DEFAULT_QUBIT_CAP)
    }

    fn basis_with_cap(num_qubits: usize, index: usize, cap: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("num_qubits", "a register needs at least one qubit"));
        }
        if num_qubits > cap {
            return Err(Error::Resource {
                what: "qubit count",
                requested: num_qubits,
                cap,
                detail: String::new(),
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::invalid("index", format!("{index} >= 2^{num_qubits}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Wraps an explicit amplitude array; it must be normalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::invalid(
                "amplitudes",
                format!("length {} is not a power of two >= 2", amps.len()),
            ));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        let state = StateVector { num_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::invalid("amplitudes", format!("norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Haar-ish random state from a seed (normalised Gaussian components).
    pub fn random(num_qubits: usize, seed: u64) -> Result<Self> {
        let mut state = Self::new(num_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in state.amps.iter_mut() {
            *a = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
        }
        let norm = state.norm();
        state.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|| self - other ||_2`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn same_shape(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    /// Index mask of qubit `q`.
    pub fn mask(&self, q: QubitIndex) -> usize {
        1usize << (self.num_qubits - 1 - q.0)
    }

    /// Checks that every index is in range and appears once.
    pub fn check_qubits(&self, qs: &[QubitIndex]) -> Result<()> {
        let mut seen = 0usize;
        for q in qs {
            if q.0 >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q.0,
                    num_qubits: self.num_qubits,
                });
            }
            let m = self.mask(*q);
            if seen & m != 0 {
                return Err(Error::DuplicateQubit(q.0));
            }
            seen |= m;
        }
        Ok(())
    }

    /// Read the listed qubits of a basis index as an integer, first listed
    /// qubit most significant.
    pub fn extract(&self, index: usize, qs: &[QubitIndex]) -> usize {
        read_bits(self.num_qubits, index, qs)
    }

    /// Applies one local gate. Oracle calls need a backend and are rejected.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        self.apply_with(op, Execution::auto(self.amps.len()))
    }

    pub fn apply_with(&mut self, op: &GateOp, exec: Execution) -> Result<()> {
        self.check_qubits(&op_qubits_for_check(op))?;
        match op {
            GateOp::Single { target, matrix } => {
                let dev = matrix.unitarity_deviation();
                if dev > TOLERANCE {
                    return Err(Error::NonUnitary { deviation: dev });
                }
                let m = matrix.0;
                let stride = self.mask(*target);
                par::for_each_pair(&mut self.amps, stride, exec, |_, a0, a1| {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = m[0][0] * x0 + m[0][1] * x1;
                    *a1 = m[1][0] * x0 + m[1][1] * x1;
                });
            }
            GateOp::Cnot { control, target } => {
                let cm = self.mask(*control);
                self.flip_if(*target, exec, move |i| i & cm != 0);
            }
            GateOp::Mcx { controls, target } => {
                let (mut care, mut want) = (0usize, 0usize);
                for (q, v) in controls {
                    let m = self.mask(*q);
                    care |= m;
                    if *v {
                        want |= m;
                    }
                }
                self.flip_if(*target, exec, move |i| i & care == want);
            }
            GateOp::ReflectZero { qubits } => {
                let care = qubits.iter().fold(0, |acc, q| acc | self.mask(*q));
                self.phase_if(exec, move |i| i & care != 0);
            }
            GateOp::Oracle { .. } => return Err(Error::MissingOracle(0)),
            GateOp::Adjoint(ops) => {
                for inv in adjoint_circuit(ops) {
                    self.apply_with(&inv, exec)?;
                }
            }
        }
        Ok(())
    }

    /// Applies a whole circuit of local gates.
    pub fn apply_circuit(&mut self, ops: &[GateOp]) -> Result<()> {
        for (i, op) in ops.iter().enumerate() {
            self.apply(op).map_err(|e| match e {
                Error::MissingOracle(_) => Error::MissingOracle(i),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Applies the inverse of `ops`: inverse gates in reverse order.
    pub fn apply_adjoint(&mut self, ops: &[GateOp]) -> Result<()> {
        self.apply_circuit(&adjoint_circuit(ops))
    }

    /// Swap the `target = 0` and `target = 1` amplitudes wherever `pred`
    /// holds on the lower index.
    pub fn flip_if<P>(&mut self, target: QubitIndex, exec: Execution, pred: P)
    where
        P: Fn(usize) -> bool + Sync + Send,
    {
        let stride = self.mask(target);
        par::for_each_pair(&mut self.amps, stride, exec, |i, a0, a1| {
            if pred(i) {
                std::mem::swap(a0, a1);
            }
        });
    }

    /// Negate every amplitude whose index satisfies `pred`.
    pub fn phase_if<P>(&mut self, exec: Execution, pred: P)
    where
        P: Fn(usize) -> bool + Sync + Send,
    {
        par::for_each_amp(&mut self.amps, exec, |i, a| {
            if pred(i) {
                *a = -*a;
            }
        });
    }

    /// Marginal probabilities of the listed qubits, indexed by outcome
    /// (first listed qubit most significant). No collapse happens.
    pub fn marginal(&self, qs: &[QubitIndex]) -> Result<Vec<f64>> {
        self.check_qubits(qs)?;
        let mut probs = vec![0.0; 1 << qs.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[self.extract(i, qs)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Marginal distribution keyed by outcome bit strings. Outcomes below
    /// `1e-15` are omitted.
    pub fn output_distribution(&self, qs: &[QubitIndex]) -> Result<BTreeMap<String, f64>> {
        let probs = self.marginal(qs)?;
        Ok(probs
            .into_iter()
            .enumerate()
            .filter(|(_, p)| *p >= 1e-15)
            .map(|(k, p)| (bit_string(k, qs.len()), p))
            .collect())
    }

    /// Seeded shot sampler for demonstrations; analysis code uses
    /// [`StateVector::marginal`] instead.
    pub fn sample(&self, qs: &[QubitIndex], shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
        let probs = self.marginal(qs)?;
        let dist = WeightedIndex::new(&probs).map_err(|e| Error::invalid("state", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(bit_string(dist.sample(&mut rng), qs.len())).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

fn op_qubits_for_check(op: &GateOp) -> Vec<QubitIndex> {
    match op {
        // Sub-circuits may legitimately reuse qubits across gates.
        GateOp::Adjoint(_) => Vec::new(),
        other => other.touched(),
    }
}

/// Reads the listed qubits of `index` in a `num_qubits` register, first
/// listed qubit most significant.
pub fn read_bits(num_qubits: usize, index: usize, qs: &[QubitIndex]) -> usize {
    qs.iter()
        .fold(0, |acc, q| (acc << 1) | (index >> (num_qubits - 1 - q.0) & 1))
}

/// `width`-character binary string of `value`, most significant bit first.
pub fn bit_string(value: usize, width: usize) -> String {
    (0..width)
        .map(|i| if value >> (width - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; the exact distribution is irrelevant for test states.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
