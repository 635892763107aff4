//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulator, differentiation engine, and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::statevec::MAX_QUBITS)]
    Capacity(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("duplicate qubit {0} in gate targets/control")]
    DuplicateQubit(usize),

    #[error("parameter slot {slot} out of range ({available} available)")]
    UnresolvedSlot { slot: usize, available: usize },

    #[error("gate {0} does not take a parameter slot")]
    UnexpectedSlot(&'static str),

    #[error("gate {0} requires a parameter slot")]
    MissingSlot(&'static str),

    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("post-selection annihilates the state (probability mass {0:.3e})")]
    DegeneratePostselection(f64),

    #[error("operation requires a unitary layer variant, got {0}")]
    UnsupportedVariant(&'static str),

    #[error("finite-difference step {0:.3e} outside allowed range [1e-7, 1e-3]")]
    StepOutOfRange(f64),

    #[error("LCU decomposition invalid: {0}")]
    InvalidDecomposition(String),

    #[error("classical parameter count must be positive")]
    ZeroClassicalBaseline,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("malformed {format} data: {reason}")]
    Format { format: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
