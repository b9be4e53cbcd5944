//! Deutsch-Jozsa and Grover-style search deciders.
//!
//! The search decider replaces randomised run lengths with a fixed ladder
//! `1, 2, 3, 5, 8, ..` capped at `ceil(sqrt(2^m))`. Each run prepares a
//! fresh search register, applies `j` Grover iterations and then checks
//! the candidate with one more oracle call written to a record qubit. The
//! check is applied before measurement, which is equivalent to measuring
//! the register and querying the outcome, so all probabilities are exact.

use serde::{Deserialize, Serialize};

use crate::circuit::{run_from_zero, OracleBackend, TableOracle};
use crate::error::{Error, Result};
use crate::oracle::{classical_predicate, OracleTable, Predicate};
use crate::state::{qubits, GateOp, QubitIndex, StateVector, DEFAULT_QUBIT_CAP};

/// What a search looks for, and which quantifier it decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    /// Search for a one; decides the OR of the table.
    Or,
    /// Search for a zero; decides the AND of the table.
    And,
}

impl Sense {
    /// Table value that counts as a witness.
    pub fn marked(self) -> bool {
        self == Sense::Or
    }

    /// Decision when no witness turns up.
    pub fn default_answer(self) -> bool {
        self == Sense::And
    }

    pub fn flip(self) -> Sense {
        match self {
            Sense::Or => Sense::And,
            Sense::And => Sense::Or,
        }
    }
}

/// Grover run lengths for one repetition of the search decider.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSchedule {
    runs: Vec<usize>,
}

impl RunSchedule {
    /// `ceil(sqrt(2^m))`, the largest run length in the ladder.
    pub fn cap(m: usize) -> usize {
        let size = 1u128 << m;
        let mut c = (size as f64).sqrt().ceil() as usize;
        while (c as u128) * (c as u128) < size {
            c += 1;
        }
        while c > 1 && ((c - 1) as u128) * ((c - 1) as u128) >= size {
            c -= 1;
        }
        c
    }

    /// The deterministic ladder `1, 2, 3, 5, 8, ..` up to `cap(m)`.
    pub fn ladder(m: usize) -> Self {
        let cap = Self::cap(m);
        let mut runs = Vec::new();
        let (mut a, mut b) = (1, 2);
        while a <= cap {
            runs.push(a);
            (a, b) = (b, a + b);
        }
        RunSchedule { runs }
    }

    /// A hand-picked schedule; every run length must be at most `cap(m) + 1`.
    pub fn custom(m: usize, runs: Vec<usize>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::invalid("schedule", "at least one run is required"));
        }
        let limit = Self::cap(m) + 1;
        if let Some(j) = runs.iter().find(|j| **j > limit) {
            return Err(Error::invalid("schedule", format!("run length {j} exceeds {limit}")));
        }
        Ok(RunSchedule { runs })
    }

    pub fn runs(&self) -> &[usize] {
        &self.runs
    }

    /// Oracle calls per repetition, checks included.
    pub fn queries_per_repetition(&self) -> u64 {
        self.runs.iter().map(|j| *j as u64 + 1).sum()
    }
}

/// Outcome of a decider, with exact probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeciderResult {
    /// Most likely output.
    pub answer: bool,
    /// Probability that the procedure outputs 1.
    pub prob_one: f64,
    /// Probability of outputting the classically computed truth. When the
    /// input violates a promise this is the probability of `answer`.
    pub success_probability: f64,
    pub queries: u64,
    /// `queries / (k sqrt(2^m))` for search deciders.
    pub query_constant: Option<f64>,
}

impl DeciderResult {
    pub(crate) fn from_prob(prob_one: f64, truth: Option<bool>, queries: u64) -> Self {
        // rounding can leave the sum a few ulps outside [0, 1]
        let prob_one = prob_one.clamp(0.0, 1.0);
        let answer = prob_one >= 0.5;
        let success_probability = match truth {
            Some(true) => prob_one,
            Some(false) => 1.0 - prob_one,
            None if answer => prob_one,
            None => 1.0 - prob_one,
        };
        DeciderResult {
            answer,
            prob_one,
            success_probability,
            queries,
            query_constant: None,
        }
    }
}

/// Deutsch-Jozsa circuit on `n` inputs; qubit `n` is the phase ancilla.
pub fn deutsch_jozsa_circuit(n: usize) -> Vec<GateOp> {
    let mut ops: Vec<GateOp> = (0..n).map(GateOp::h).collect();
    ops.extend(phase_oracle_ops(&(0..n).collect::<Vec<_>>(), n, false));
    ops.extend((0..n).map(GateOp::h));
    ops
}

/// Decides BAL with a single query: output 0 iff the all-zero outcome is seen.
pub fn deutsch_jozsa(f: &OracleTable) -> Result<DeciderResult> {
    deutsch_jozsa_with(f, &mut TableOracle::new(f), DEFAULT_QUBIT_CAP)
}

/// Deutsch-Jozsa through an arbitrary oracle backend. `truth_table` is only
/// used to score the outcome.
pub fn deutsch_jozsa_with<B: OracleBackend + ?Sized>(truth_table: &OracleTable, backend: &mut B, cap: usize) -> Result<DeciderResult> {
    let n = truth_table.n();
    if n == 0 {
        return Err(Error::invalid("n", "Deutsch-Jozsa needs at least one input bit"));
    }
    let before = backend.queries();
    let state = run_from_zero(n + 1, &deutsch_jozsa_circuit(n), backend, cap)?;
    let p_zero = state.marginal(&qubits(0..n))?[0];
    let truth = classical_predicate(&Predicate::Bal, truth_table)?;
    Ok(DeciderResult::from_prob(1.0 - p_zero, truth, backend.queries() - before))
}

/// Phase kickback through `ancilla`, which starts and ends in `|0>`.
/// With `negate` the whole operation also picks up a factor of -1, turning
/// a phase on the ones into a phase on the zeros.
pub fn phase_oracle_ops(inputs: &[usize], ancilla: usize, negate: bool) -> Vec<GateOp> {
    let mut ops = vec![GateOp::x(ancilla), GateOp::h(ancilla), GateOp::oracle(inputs, ancilla)];
    if negate {
        // X|-> = -|->
        ops.push(GateOp::x(ancilla));
    }
    ops.extend([GateOp::h(ancilla), GateOp::x(ancilla)]);
    ops
}

/// Inversion about the mean on `register`.
pub fn diffusion_ops(register: &[usize]) -> Vec<GateOp> {
    let mut ops: Vec<GateOp> = register.iter().map(|q| GateOp::h(*q)).collect();
    ops.push(GateOp::ReflectZero {
        qubits: qubits(register.iter().copied()),
    });
    ops.extend(register.iter().map(|q| GateOp::h(*q)));
    ops
}

/// One Grover iteration: phase oracle then diffusion.
pub fn grover_iteration_ops(register: &[usize], ancilla: usize, sense: Sense) -> Vec<GateOp> {
    let mut ops = phase_oracle_ops(register, ancilla, sense == Sense::And);
    ops.extend(diffusion_ops(register));
    ops
}

/// Applies `j` Grover iterations to `register` of `state`, using `ancilla`
/// for phase kickback. The backend counts one query per iteration.
pub fn grover_iterate<B: OracleBackend + ?Sized>(
    state: &mut StateVector,
    register: &[QubitIndex],
    ancilla: QubitIndex,
    j: usize,
    sense: Sense,
    backend: &mut B,
) -> Result<()> {
    let reg: Vec<usize> = register.iter().map(|q| q.0).collect();
    let iteration = grover_iteration_ops(&reg, ancilla.0, sense);
    for _ in 0..j {
        crate::circuit::run_circuit(state, &iteration, backend)?;
    }
    Ok(())
}

/// Circuit of one search run of length `j` over `m` qubits. Layout:
/// search register `0..m`, phase ancilla `m`, record qubit `m + 1`.
pub fn search_run_circuit(m: usize, j: usize, sense: Sense) -> Vec<GateOp> {
    let reg: Vec<usize> = (0..m).collect();
    let mut ops: Vec<GateOp> = reg.iter().map(|q| GateOp::h(*q)).collect();
    for _ in 0..j {
        ops.extend(grover_iteration_ops(&reg, m, sense));
    }
    ops.push(GateOp::oracle(&reg, m + 1));
    ops
}

/// Probability that one run finds a witness.
fn run_success<B: OracleBackend + ?Sized>(m: usize, j: usize, sense: Sense, backend: &mut B, cap: usize) -> Result<f64> {
    let state = run_from_zero(m + 2, &search_run_circuit(m, j, sense), backend, cap)?;
    let record = state.marginal(&[QubitIndex(m + 1)])?;
    Ok(record[usize::from(sense.marked())])
}

/// Bounded-error OR decider: `k` repetitions of the run ladder. Never errs
/// on unsatisfiable tables.
pub fn or_decider(f: &OracleTable, k: usize, schedule: &RunSchedule) -> Result<DeciderResult> {
    search_decider(f, Sense::Or, k, schedule, &mut TableOracle::new(f), DEFAULT_QUBIT_CAP)
}

/// The search decider for either sense over an arbitrary backend.
/// `truth_table` scores the outcome and fixes `m`.
pub fn search_decider<B: OracleBackend + ?Sized>(
    truth_table: &OracleTable,
    sense: Sense,
    k: usize,
    schedule: &RunSchedule,
    backend: &mut B,
    cap: usize,
) -> Result<DeciderResult> {
    if k == 0 {
        return Err(Error::invalid("k", "at least one repetition is required"));
    }
    let m = truth_table.n();
    if m == 0 {
        return Err(Error::invalid("n", "search needs at least one input bit"));
    }
    let before = backend.queries();
    let mut miss = 1.0;
    for _ in 0..k {
        for &j in schedule.runs() {
            miss *= 1.0 - run_success(m, j, sense, backend, cap)?;
        }
    }
    let found = 1.0 - miss;
    let prob_one = if sense.marked() { found } else { miss };
    let predicate = match sense {
        Sense::Or => Predicate::Or,
        Sense::And => Predicate::And,
    };
    let truth = classical_predicate(&predicate, truth_table)?;
    let queries = backend.queries() - before;
    let mut result = DeciderResult::from_prob(prob_one, truth, queries);
    result.query_constant = Some(queries as f64 / (k as f64 * ((1u64 << m) as f64).sqrt()));
    Ok(result)
}
