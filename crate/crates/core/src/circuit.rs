//! Executing circuits that contain black-box calls.

use crate::error::{Error, Result};
use crate::oracle::{apply_f_gate, OracleTable, QueryCounter};
use crate::state::{adjoint_circuit, GateOp, QubitIndex, StateVector};

/// Resolves oracle calls (and optionally polices local gates) while a
/// circuit runs.
pub trait OracleBackend {
    /// One call of the black box on `inputs` with target `output`.
    fn call(&mut self, state: &mut StateVector, inputs: &[QubitIndex], output: QubitIndex) -> Result<()>;

    /// A non-oracle gate.
    fn local(&mut self, state: &mut StateVector, op: &GateOp) -> Result<()> {
        state.apply(op)
    }

    /// Scratch qubits the backend needs appended after the circuit's own.
    fn extra_qubits(&self) -> usize {
        0
    }

    /// Oracle calls made so far.
    fn queries(&self) -> u64;
}

/// Backend answering calls directly from a truth table.
#[derive(Debug)]
pub struct TableOracle<'a> {
    f: &'a OracleTable,
    counter: QueryCounter,
}

impl<'a> TableOracle<'a> {
    pub fn new(f: &'a OracleTable) -> Self {
        TableOracle {
            f,
            counter: QueryCounter::new(),
        }
    }

    pub fn counter(&self) -> QueryCounter {
        self.counter
    }
}

impl OracleBackend for TableOracle<'_> {
    fn call(&mut self, state: &mut StateVector, inputs: &[QubitIndex], output: QubitIndex) -> Result<()> {
        apply_f_gate(state, self.f, inputs, output, &mut self.counter)
    }

    fn queries(&self) -> u64 {
        self.counter.count()
    }
}

/// Runs `ops` on `state`, sending oracle calls to `backend`.
pub fn run_circuit<B: OracleBackend + ?Sized>(state: &mut StateVector, ops: &[GateOp], backend: &mut B) -> Result<()> {
    for op in ops {
        match op {
            GateOp::Oracle { inputs, output } => backend.call(state, inputs, *output)?,
            GateOp::Adjoint(inner) => run_circuit(state, &adjoint_circuit(inner), backend)?,
            local => backend.local(state, local)?,
        }
    }
    Ok(())
}

/// Oracle calls `ops` will make.
pub fn circuit_queries(ops: &[GateOp]) -> usize {
    ops.iter().map(GateOp::oracle_calls).sum()
}

/// Highest qubit index used by `ops`, plus one.
pub fn circuit_width(ops: &[GateOp]) -> usize {
    ops.iter()
        .flat_map(GateOp::touched)
        .map(|q| q.0 + 1)
        .max()
        .unwrap_or(0)
}

/// Allocates a register for `ops` (plus the backend's scratch qubits),
/// runs it from `|0..0>` and returns the final state.
pub fn run_from_zero<B: OracleBackend + ?Sized>(width: usize, ops: &[GateOp], backend: &mut B, cap: usize) -> Result<StateVector> {
    let total = width + backend.extra_qubits();
    let mut state = StateVector::with_cap(total, cap).map_err(|e| match e {
        Error::Resource { what, requested, cap, .. } => Error::Resource {
            what,
            requested,
            cap,
            detail: format!(" ({width} circuit qubits + {} backend scratch)", total - width),
        },
        other => other,
    })?;
    run_circuit(&mut state, ops, backend)?;
    Ok(state)
}
