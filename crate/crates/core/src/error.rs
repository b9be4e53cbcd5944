use thiserror::Error;

use crate::protocol::Party;

/// Errors raised by the simulator, the oracle model and the protocol layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A register, matrix or repetition count would exceed its cap.
    #[error("{what} {requested} exceeds the cap of {cap}{detail}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
        detail: String,
    },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("arity mismatch: expected {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("oracle call at gate {0} has no oracle backend")]
    MissingOracle(usize),

    #[error("locality violation at {step}: {party} touched qubit {qubit} owned by {owner}")]
    Locality {
        step: String,
        party: Party,
        qubit: usize,
        owner: Party,
    },

    #[error("protocol invariant broken at {step}: {reason}")]
    Protocol { step: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
