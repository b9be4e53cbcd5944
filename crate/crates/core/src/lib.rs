//! Exact state-vector simulation of black-box quantum algorithms and the
//! communication protocols built from them.
//!
//! Qubit 0 is the most significant bit of an amplitude index, and a truth
//! table stores `f(x_1, .., x_n)` at index `sum x_i 2^(n-i)`.

pub mod algorithms;
pub mod circuit;
pub mod classical;
pub mod error;
pub mod nested;
pub mod oracle;
pub mod par;
pub mod protocol;
pub mod state;

pub use algorithms::{deutsch_jozsa, grover_iterate, or_decider, search_decider, DeciderResult, RunSchedule, Sense};
pub use circuit::{run_circuit, OracleBackend, TableOracle};
pub use classical::{exact_rank, hamming_distance, CommMatrix, CommPredicate, ExactRational};
pub use error::{Error, Result};
pub use protocol::{ac0_protocol, disj_protocol, eqprime_protocol, run_protocol, Party, PartyLedger, ProtocolBackend, ProtocolOutcome, Transcript};
pub use oracle::{apply_f_gate, apply_phase_oracle, classical_predicate, pointwise_combine, Combiner, OracleTable, Predicate, QueryCounter};
pub use state::{GateOp, Matrix2, QubitIndex, StateVector};
