//! Two-party protocols obtained by running an oracle circuit for
//! `F(L(g, h))` at Alice and outsourcing every oracle call to a round trip
//! with Bob.
//!
//! Both parties act on one shared state vector; sending a qubit means
//! handing its ownership to the other party in the [`PartyLedger`]. A
//! combined call on inputs `x` and target `y` uses one scratch qubit `c`:
//!
//! 1. Alice checks `c` is `|0>`.
//! 2. Alice applies `c ^= g(x)` and sends `x, y, c` (n + 2 qubits).
//! 3. Bob applies `y ^= L(c, h(x))` and sends them back.
//! 4. Alice applies `c ^= g(x)` again, returning `c` to `|0>`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algorithms::{deutsch_jozsa_with, search_decider, DeciderResult, RunSchedule, Sense};
use crate::circuit::{run_from_zero, OracleBackend, TableOracle};
#[cfg(test)]
use crate::circuit::run_circuit;
use crate::classical::hamming_distance;
use crate::error::{Error, Result};
use crate::nested::{self, ApproxParams};
use crate::oracle::{pointwise_combine, Combiner, OracleTable};
use crate::par::Execution;
use crate::state::{qubits, read_bits, GateOp, QubitIndex, StateVector, DEFAULT_QUBIT_CAP, TOLERANCE};

/// Repetitions of the run ladder used by the DISJ protocol; keeps the
/// one-sided error at most 1/4.
pub const DISJ_K: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
        })
    }
}

/// Who holds each qubit of the shared register.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartyLedger {
    owners: Vec<Party>,
}

impl PartyLedger {
    /// Every qubit starts with Alice.
    pub fn new(num_qubits: usize) -> Self {
        PartyLedger {
            owners: vec![Party::Alice; num_qubits],
        }
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }

    pub fn owner(&self, q: QubitIndex) -> Party {
        self.owners[q.0]
    }

    pub fn assign(&mut self, q: QubitIndex, party: Party) {
        self.owners[q.0] = party;
    }

    /// Fails unless `party` holds every qubit in `qs`.
    pub fn require(&self, party: Party, qs: &[QubitIndex], step: &str) -> Result<()> {
        for q in qs {
            let owner = self.owners.get(q.0).copied().ok_or(Error::QubitOutOfRange {
                index: q.0,
                num_qubits: self.owners.len(),
            })?;
            if owner != party {
                return Err(Error::Locality {
                    step: step.to_string(),
                    party,
                    qubit: q.0,
                    owner,
                });
            }
        }
        Ok(())
    }

    /// Moves `qs` from `from` to `to`; returns the number of qubits sent.
    pub fn transfer(&mut self, from: Party, to: Party, qs: &[QubitIndex], step: &str) -> Result<usize> {
        self.require(from, qs, step)?;
        for q in qs {
            self.owners[q.0] = to;
        }
        Ok(qs.len())
    }
}

/// One message: `qubits` qubits from `from` to `to`, sent `repeat` times
/// in a row of alternating round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferEvent {
    pub from: Party,
    pub to: Party,
    pub qubits: usize,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub repeat: u64,
}

fn one() -> u64 {
    1
}

fn is_one(v: &u64) -> bool {
    *v == 1
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub events: Vec<TransferEvent>,
    pub total_qubits: u64,
    /// Set when messages only flow from Alice to Bob and Bob outputs.
    pub one_way: bool,
}

impl Transcript {
    pub fn record(&mut self, from: Party, to: Party, qubits: usize) {
        self.record_repeated(from, to, qubits, 1);
    }

    pub fn record_repeated(&mut self, from: Party, to: Party, qubits: usize, repeat: u64) {
        self.total_qubits += qubits as u64 * repeat;
        self.events.push(TransferEvent {
            from,
            to,
            qubits,
            repeat,
        });
    }

    /// Sum of the event sizes; always equal to `total_qubits`.
    pub fn event_sum(&self) -> u64 {
        self.events.iter().map(|e| e.qubits as u64 * e.repeat).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serialises")
    }
}

/// Alice's view of the oracle: her input `g`, Bob's input `h`, the
/// combiner, the ledger and the transcript.
#[derive(Debug)]
pub struct ProtocolBackend<'a> {
    g: &'a OracleTable,
    h: &'a OracleTable,
    l: Combiner,
    ledger: PartyLedger,
    transcript: Transcript,
    calls: u64,
    gates: u64,
}

impl<'a> ProtocolBackend<'a> {
    pub fn new(l: Combiner, g: &'a OracleTable, h: &'a OracleTable) -> Result<Self> {
        if g.n() != h.n() {
            return Err(Error::ArityMismatch {
                expected: g.n(),
                actual: h.n(),
            });
        }
        Ok(ProtocolBackend {
            g,
            h,
            l,
            ledger: PartyLedger::default(),
            transcript: Transcript::default(),
            calls: 0,
            gates: 0,
        })
    }

    /// Starts from a given ownership instead of "Alice holds everything".
    pub fn with_ledger(mut self, ledger: PartyLedger) -> Self {
        self.ledger = ledger;
        self
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn ledger(&self) -> &PartyLedger {
        &self.ledger
    }

    fn sync_ledger(&mut self, state: &StateVector) -> Result<()> {
        if self.ledger.is_empty() {
            self.ledger = PartyLedger::new(state.num_qubits());
        } else if self.ledger.len() != state.num_qubits() {
            return Err(Error::DimensionMismatch {
                left: self.ledger.len(),
                right: state.num_qubits(),
            });
        }
        Ok(())
    }
}

impl OracleBackend for ProtocolBackend<'_> {
    fn call(&mut self, state: &mut StateVector, inputs: &[QubitIndex], output: QubitIndex) -> Result<()> {
        self.sync_ledger(state)?;
        let ancilla = QubitIndex(state.num_qubits() - 1);
        simulate_combined_oracle_call(
            state,
            &mut self.ledger,
            &mut self.transcript,
            (self.l, self.g, self.h),
            inputs,
            output,
            ancilla,
            self.calls,
        )?;
        self.calls += 1;
        Ok(())
    }

    fn local(&mut self, state: &mut StateVector, op: &GateOp) -> Result<()> {
        self.sync_ledger(state)?;
        let step = format!("local gate {}", self.gates);
        self.gates += 1;
        self.ledger.require(Party::Alice, &op.touched(), &step)?;
        state.apply(op)
    }

    fn extra_qubits(&self) -> usize {
        1
    }

    fn queries(&self) -> u64 {
        self.calls
    }
}

/// One call of the `L(g, h)`-gate carried out by the four-step exchange.
/// `ancilla` must be distinct from the data qubits and start in `|0>`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_combined_oracle_call(
    state: &mut StateVector,
    ledger: &mut PartyLedger,
    transcript: &mut Transcript,
    (l, g, h): (Combiner, &OracleTable, &OracleTable),
    inputs: &[QubitIndex],
    output: QubitIndex,
    ancilla: QubitIndex,
    call_index: u64,
) -> Result<()> {
    let n = g.n();
    if inputs.len() != n || h.n() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            actual: inputs.len(),
        });
    }
    let mut carried = inputs.to_vec();
    carried.push(output);
    carried.push(ancilla);
    state.check_qubits(&carried)?;
    let width = state.num_qubits();
    let exec = Execution::auto(state.amplitudes().len());
    let step = |k: usize| format!("call {call_index} step {k}");

    // 1
    ledger.require(Party::Alice, &carried, &step(1))?;
    let p1 = state.marginal(&[ancilla])?[1];
    if p1 > TOLERANCE {
        return Err(Error::Protocol {
            step: step(1),
            reason: format!("ancilla not in |0> (P(1) = {p1:.3e})"),
        });
    }

    // 2
    state.flip_if(ancilla, exec, |i| g.get(read_bits(width, i, inputs)));
    let sent = ledger.transfer(Party::Alice, Party::Bob, &carried, &step(2))?;
    transcript.record(Party::Alice, Party::Bob, sent);

    // 3
    ledger.require(Party::Bob, &carried, &step(3))?;
    let mask = 1usize << (width - 1 - ancilla.0);
    state.flip_if(output, exec, |i| l.apply(i & mask != 0, h.get(read_bits(width, i, inputs))));
    let sent = ledger.transfer(Party::Bob, Party::Alice, &carried, &step(3))?;
    transcript.record(Party::Bob, Party::Alice, sent);

    // 4
    ledger.require(Party::Alice, &carried, &step(4))?;
    state.flip_if(ancilla, exec, |i| g.get(read_bits(width, i, inputs)));
    let p1 = state.marginal(&[ancilla])?[1];
    if p1 > TOLERANCE {
        return Err(Error::Protocol {
            step: step(4),
            reason: format!("ancilla left entangled (P(1) = {p1:.3e})"),
        });
    }
    Ok(())
}

/// Output of [`run_protocol`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolRun {
    /// Distribution over the circuit's own qubits (scratch excluded), first
    /// qubit most significant.
    pub distribution: Vec<f64>,
    pub transcript: Transcript,
    pub t: u64,
}

/// Runs an oracle circuit on `width` qubits as a protocol.
pub fn run_protocol(
    circuit: &[GateOp],
    width: usize,
    l: Combiner,
    g: &OracleTable,
    h: &OracleTable,
    cap: usize,
) -> Result<ProtocolRun> {
    let mut backend = ProtocolBackend::new(l, g, h)?;
    let state = run_from_zero(width, circuit, &mut backend, cap)?;
    let distribution = state.marginal(&qubits(0..width))?;
    let t = backend.queries();
    Ok(ProtocolRun {
        distribution,
        transcript: backend.into_transcript(),
        t,
    })
}

/// The same circuit run directly against the combined table.
pub fn run_direct(circuit: &[GateOp], width: usize, f: &OracleTable, cap: usize) -> Result<Vec<f64>> {
    let state = run_from_zero(width, circuit, &mut TableOracle::new(f), cap)?;
    state.marginal(&qubits(0..width))
}

/// Summary of a protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub problem: String,
    pub n: usize,
    pub t: u64,
    pub comm_qubits: u64,
    pub success_prob: f64,
    pub one_way: bool,
    pub answer: bool,
    pub prob_one: f64,
    #[serde(skip)]
    pub transcript: Transcript,
}

impl ProtocolOutcome {
    fn new(problem: &str, n: usize, result: &DeciderResult, transcript: Transcript) -> Self {
        ProtocolOutcome {
            problem: problem.to_string(),
            n,
            t: result.queries,
            comm_qubits: transcript.total_qubits,
            success_prob: result.success_probability,
            one_way: transcript.one_way,
            answer: result.answer,
            prob_one: result.prob_one,
            transcript,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("outcome serialises")
    }
}

/// DISJ via the search decider with `L = AND`.
pub fn disj_protocol(g: &OracleTable, h: &OracleTable) -> Result<ProtocolOutcome> {
    let combined = pointwise_combine(Combiner::AND, g, h)?;
    let n = g.n();
    let mut backend = ProtocolBackend::new(Combiner::AND, g, h)?;
    let r = search_decider(&combined, Sense::Or, DISJ_K, &RunSchedule::ladder(n), &mut backend, DEFAULT_QUBIT_CAP)?;
    Ok(ProtocolOutcome::new("disj", n, &r, backend.into_transcript()))
}

/// Two-way EQ' protocol: Deutsch-Jozsa on `XOR(g, h)` through the
/// general simulation. The answer is 1 iff `g = h`.
pub fn eqprime_two_way(g: &OracleTable, h: &OracleTable) -> Result<ProtocolOutcome> {
    let combined = pointwise_combine(Combiner::XOR, g, h)?;
    let mut backend = ProtocolBackend::new(Combiner::XOR, g, h)?;
    let dj = deutsch_jozsa_with(&combined, &mut backend, DEFAULT_QUBIT_CAP)?;
    let eq = negate(&dj, promise_truth(g, h)?);
    Ok(ProtocolOutcome::new("eqprime", g.n(), &eq, backend.into_transcript()))
}

fn promise_truth(g: &OracleTable, h: &OracleTable) -> Result<Option<bool>> {
    let d = hamming_distance(g, h)?;
    Ok(if d == 0 {
        Some(true)
    } else if 2 * d == g.len() {
        Some(false)
    } else {
        None
    })
}

fn negate(r: &DeciderResult, truth: Option<bool>) -> DeciderResult {
    DeciderResult::from_prob(1.0 - r.prob_one, truth, r.queries)
}

/// One-way EQ': Alice prepares `sum_x |x>|->`, applies her half of the
/// XOR oracle (`y ^= g(x)`) and sends the `n + 1` qubits; Bob applies
/// `y ^= h(x)`, then `H` on `x`, and outputs 1 iff he sees all zeros.
/// Outside the promise the run still terminates; its answer is then
/// meaningless.
pub fn eqprime_protocol(g: &OracleTable, h: &OracleTable) -> Result<ProtocolOutcome> {
    let n = g.n();
    if h.n() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            actual: h.n(),
        });
    }
    if n == 0 {
        return Err(Error::invalid("n", "EQ' needs at least one input bit"));
    }
    let width = n + 1;
    let xs = qubits(0..n);
    let y = QubitIndex(n);
    let mut all = xs.clone();
    all.push(y);
    let mut ledger = PartyLedger::new(width);
    let mut transcript = Transcript {
        one_way: true,
        ..Transcript::default()
    };
    let mut state = StateVector::new(width)?;

    ledger.require(Party::Alice, &all, "alice prepares")?;
    for q in 0..n {
        state.apply(&GateOp::h(q))?;
    }
    state.apply(&GateOp::x(n))?;
    state.apply(&GateOp::h(n))?;
    state.flip_if(y, Execution::Sequential, |i| g.get(read_bits(width, i, &xs)));
    let sent = ledger.transfer(Party::Alice, Party::Bob, &all, "alice sends")?;
    transcript.record(Party::Alice, Party::Bob, sent);

    ledger.require(Party::Bob, &all, "bob finishes")?;
    state.flip_if(y, Execution::Sequential, |i| h.get(read_bits(width, i, &xs)));
    for q in 0..n {
        state.apply(&GateOp::h(q))?;
    }
    let p_equal = state.marginal(&xs)?[0];
    let r = DeciderResult::from_prob(p_equal, promise_truth(g, h)?, 1);
    Ok(ProtocolOutcome::new("eqprime", n, &r, transcript))
}

/// Decides the alternating formula `SIGMA_d` (or `PI_d` with `pi`) on
/// `L(g, h)`.
///
/// The nested deciders are evaluated by the factored engine, which needs
/// the oracle only on basis inputs. Each value `L(g, h)(x)` is obtained by
/// running the four-step exchange on `|x>|0>`; the transcript then charges
/// one round trip of `n + 2` qubits per oracle call of the nested
/// procedure.
pub fn ac0_protocol(params: &ApproxParams, pi: bool, l: Combiner, g: &OracleTable, h: &OracleTable) -> Result<ProtocolOutcome> {
    let n = g.n();
    if h.n() != n || params.n != n {
        return Err(Error::ArityMismatch {
            expected: n,
            actual: params.n,
        });
    }
    let width = n + 1;
    let xs = qubits(0..n);
    let mut bits = Vec::with_capacity(1 << n);
    for x in 0..1usize << n {
        let mut state = StateVector::basis(width + 1, x << 2)?;
        let mut ledger = PartyLedger::new(width + 1);
        let mut scratch = Transcript::default();
        simulate_combined_oracle_call(
            &mut state,
            &mut ledger,
            &mut scratch,
            (l, g, h),
            &xs,
            QubitIndex(n),
            QubitIndex(n + 1),
            x as u64,
        )?;
        bits.push(state.probability((x << 2) | 2) > 0.5);
    }
    let combined = OracleTable::new(n, bits)?;
    let r = if pi {
        nested::pi_d_eval(&combined, params)?
    } else {
        nested::sigma_d_eval(&combined, params)?
    };
    let mut transcript = Transcript::default();
    transcript.record_repeated(Party::Alice, Party::Bob, n + 2, r.queries);
    transcript.record_repeated(Party::Bob, Party::Alice, n + 2, r.queries);
    // the repeated pair stands for t alternating round trips
    let problem = if pi { "ac0-pi" } else { "ac0-sigma" };
    Ok(ProtocolOutcome::new(problem, n, &r, transcript))
}

/// Reference for [`ac0_protocol`] on instances small enough for the dense
/// gates: every top-level run and prefix check is executed gate by gate
/// through a [`ProtocolBackend`]. Returns `P(SIGMA_d = 1)`, the number of
/// combined calls and the qubits sent, both counted by the backends for
/// one full evaluation (each repetition runs the ladder and checks one
/// candidate per run).
pub fn ac0_protocol_dense(params: &ApproxParams, l: Combiner, g: &OracleTable, h: &OracleTable, cap: usize) -> Result<(f64, u64, u64)> {
    if h.n() != g.n() || params.n != g.n() {
        return Err(Error::ArityMismatch {
            expected: g.n(),
            actual: params.n,
        });
    }
    let eval = nested::dense_sigma_with(params, cap, || ProtocolBackend::new(l, g, h))?;
    let check = &eval.checks[0];
    let (mut t, mut comm) = (0u64, 0u64);
    for run in &eval.runs {
        t += run.queries() + check.queries();
        comm += run.transcript().total_qubits + check.transcript().total_qubits;
    }
    let reps = eval.repetitions as u64;
    Ok((eval.probability, t * reps, comm * reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::apply_f_gate;
    use crate::oracle::QueryCounter;

    fn t(s: &str) -> OracleTable {
        OracleTable::from_bit_str(s).unwrap()
    }

    #[test]
    fn combined_call_examples() {
        let g = t("0110");
        let h = t("1100");
        let mut state = StateVector::basis(4, 0b1000).unwrap();
        let mut ledger = PartyLedger::new(4);
        let mut tr = Transcript::default();
        simulate_combined_oracle_call(&mut state, &mut ledger, &mut tr, (Combiner::AND, &g, &h), &qubits([0, 1]), QubitIndex(2), QubitIndex(3), 0).unwrap();
        assert!((state.probability(0b1000) - 1.0).abs() < TOLERANCE);
        assert_eq!(tr.total_qubits, 8);
        assert_eq!(tr.events.len(), 2);

        let zero = OracleTable::constant(2, false).unwrap();
        let start = StateVector::random(3, 4).unwrap();
        // |psi> (x) |0> on the scratch qubit
        let amps = (0..16)
            .map(|i| if i & 1 == 0 { start.amplitude(i >> 1) } else { Default::default() })
            .collect();
        let mut padded = StateVector::from_amplitudes(amps).unwrap();
        let before = padded.clone();
        let mut tr = Transcript::default();
        simulate_combined_oracle_call(&mut padded, &mut PartyLedger::new(4), &mut tr, (Combiner::AND, &g, &zero), &qubits([0, 1]), QubitIndex(2), QubitIndex(3), 0).unwrap();
        assert!(padded.distance(&before).unwrap() < TOLERANCE);
        assert_eq!(tr.total_qubits, 8);
    }

    #[test]
    fn combined_call_matches_f_gate_on_superpositions() {
        let g = t("01101001");
        let h = t("00111100");
        for l in Combiner::all() {
            let f = pointwise_combine(l, &g, &h).unwrap();
            let mut a = StateVector::new(5).unwrap();
            for q in 0..4 {
                a.apply(&GateOp::single(q, crate::state::Matrix2::ry(0.3 + q as f64))).unwrap();
            }
            let mut b = a.clone();
            simulate_combined_oracle_call(&mut a, &mut PartyLedger::new(5), &mut Transcript::default(), (l, &g, &h), &qubits([0, 1, 2]), QubitIndex(3), QubitIndex(4), 0).unwrap();
            apply_f_gate(&mut b, &f, &qubits([0, 1, 2]), QubitIndex(3), &mut QueryCounter::new()).unwrap();
            assert!(a.distance(&b).unwrap() < TOLERANCE);
        }
    }

    #[test]
    fn locality_is_enforced() {
        let g = t("0110");
        let mut ledger = PartyLedger::new(4);
        ledger.assign(QubitIndex(0), Party::Bob);
        let circuit = vec![GateOp::h(0)];
        let mut backend = ProtocolBackend::new(Combiner::AND, &g, &g).unwrap().with_ledger(ledger.clone());
        let mut state = StateVector::new(4).unwrap();
        let err = run_circuit(&mut state, &circuit, &mut backend).unwrap_err();
        assert!(matches!(err, Error::Locality { party: Party::Alice, qubit: 0, owner: Party::Bob, .. }));

        let mut backend = ProtocolBackend::new(Combiner::AND, &g, &g).unwrap().with_ledger(ledger);
        let err = run_circuit(&mut state, &[GateOp::oracle(&[0, 1], 2)], &mut backend).unwrap_err();
        assert!(matches!(err, Error::Locality { .. }));
        assert!(err.to_string().contains("step 1"));
    }

    #[test]
    fn dirty_ancilla_is_rejected() {
        let g = t("0110");
        let mut state = StateVector::basis(4, 1).unwrap();
        let err = simulate_combined_oracle_call(&mut state, &mut PartyLedger::new(4), &mut Transcript::default(), (Combiner::AND, &g, &g), &qubits([0, 1]), QubitIndex(2), QubitIndex(3), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol { .. }));
    }

    #[test]
    fn run_protocol_costs() {
        let g = t("01101001");
        let empty = run_protocol(&[GateOp::h(0)], 4, Combiner::AND, &g, &g, 26).unwrap();
        assert_eq!(empty.transcript.total_qubits, 0);
        let five: Vec<GateOp> = (0..5).map(|_| GateOp::oracle(&[0, 1, 2], 3)).collect();
        let run = run_protocol(&five, 4, Combiner::AND, &g, &g, 26).unwrap();
        assert_eq!(run.t, 5);
        assert_eq!(run.transcript.total_qubits, 50);
        assert_eq!(run.transcript.event_sum(), 50);
    }

    #[test]
    fn dj_under_xor_detects_equality() {
        let g = t("01101001");
        let circuit = crate::algorithms::deutsch_jozsa_circuit(3);
        let run = run_protocol(&circuit, 4, Combiner::XOR, &g, &g, 26).unwrap();
        let p_zero: f64 = run.distribution[0] + run.distribution[1];
        assert!((p_zero - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn disj_examples() {
        let zero = OracleTable::constant(2, false).unwrap();
        let r = disj_protocol(&zero, &t("1011")).unwrap();
        assert!(!r.answer && r.success_prob == 1.0);
        assert_eq!(r.comm_qubits, r.t * 8);
        assert!(!disj_protocol(&t("1100"), &t("0011")).unwrap().answer);
        let r = disj_protocol(&t("1100"), &t("0101")).unwrap();
        assert!(r.answer && r.success_prob >= 2.0 / 3.0);
    }

    #[test]
    fn eqprime_examples() {
        let g = t("01101001");
        let r = eqprime_protocol(&g, &g).unwrap();
        assert!(r.answer && (r.success_prob - 1.0).abs() < TOLERANCE);
        assert!(r.one_way && r.comm_qubits <= 5);
        let r = eqprime_protocol(&t("0000"), &t("0011")).unwrap();
        assert!(!r.answer && (r.success_prob - 1.0).abs() < TOLERANCE);
        let r = eqprime_two_way(&t("0000"), &t("0011")).unwrap();
        assert!(!r.answer && r.comm_qubits == 8 && !r.one_way);
        // outside the promise: still terminates
        eqprime_protocol(&t("0000"), &t("0001")).unwrap();
    }

    #[test]
    fn ac0_examples() {
        let ones = OracleTable::constant(2, true).unwrap();
        let p = ApproxParams::sigma_default(2, vec![1, 1]).unwrap();
        let r = ac0_protocol(&p, false, Combiner::AND, &ones, &ones).unwrap();
        assert!(r.answer);
        assert_eq!(r.comm_qubits, r.t * 8);

        let d1 = ApproxParams::new(2, vec![2], vec![DISJ_K], 0.1).unwrap();
        let g = t("1100");
        let h = t("0101");
        let a = ac0_protocol(&d1, false, Combiner::AND, &g, &h).unwrap();
        let b = disj_protocol(&g, &h).unwrap();
        assert_eq!((a.answer, a.t, a.comm_qubits), (b.answer, b.t, b.comm_qubits));
        assert!((a.prob_one - b.prob_one).abs() < 1e-12);
    }

    #[test]
    fn ac0_factored_matches_gate_level_protocol() {
        let p = ApproxParams::new(2, vec![1, 1], vec![1, 2], 0.25).unwrap();
        for (g, h) in [("1111", "1111"), ("1101", "0111"), ("0110", "1100"), ("0011", "0011")] {
            let (g, h) = (t(g), t(h));
            for l in [Combiner::AND, Combiner::XOR] {
                let fast = ac0_protocol(&p, false, l, &g, &h).unwrap();
                let (prob, calls, comm) = ac0_protocol_dense(&p, l, &g, &h, 24).unwrap();
                assert!((fast.prob_one - prob).abs() < 1e-9);
                assert_eq!((fast.t, fast.comm_qubits), (calls, comm));
            }
        }
    }
}
