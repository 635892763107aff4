//! Exact statevector simulation of non-unitary quantum layers with a hybrid
//! quantum-classical training and statistics harness.
//!
//! The core construction is the single-ancilla linear-combination-of-unitaries
//! wrapper: a variational circuit W is applied controlled on an ancilla in
//! superposition, and post-selecting the ancilla on 0 realizes the
//! non-unitary map (I + W)/2 on the main register. The crate provides
//!
//! * [`statevec`] — the dense simulator: states, gates, post-selection;
//! * [`circuits`] — builders for angle embedding, the blocked RX/CNOT
//!   ansatz, the LCU wrapper, and two IQP variants, plus forward passes;
//! * [`lcu`] — the general K-term prepare/select/unprepare construction;
//! * [`grad`] — adjoint reverse-mode, parameter-shift, and finite
//!   differences through the post-selected outputs;
//! * [`fisher`] — quantum Fisher information and parameter-efficiency
//!   metrics;
//! * [`hybrid`] — dense extractor/head networks around a quantum layer,
//!   Adam, and the training loop;
//! * [`harness`] — datasets, sweep orchestration, Welch statistics, and
//!   report emission;
//! * [`oracle`] — independent reference routes (dense matrices, fidelity
//!   finite differences, continued fractions) used by tests and `verify`.
//!
//! Start with the runnable examples: `cargo run --release --example
//! lcu_postselection`, `train_hybrid`, and friends each demonstrate one
//! capability end to end.

pub mod circuits;
pub mod cli;
pub mod error;
pub mod fisher;
pub mod grad;
pub mod harness;
pub mod hybrid;
pub mod lcu;
pub mod linalg;
pub mod oracle;
pub mod statevec;

pub use circuits::{
    build_angle_embedding, build_iqp_block, build_iqp_data_block, build_iqp_embedding_model,
    build_lcu_wrapped, build_variational_ansatz, forward_nonunitary, forward_nonunitary_sampled,
    forward_unitary, layer_program, main_program, CircuitProgram, LayerVariant, QuantumLayerSpec,
};
pub use error::{Error, Result};
pub use fisher::{
    effective_dimension, fisher_efficiency, fisher_efficiency_perf, qfi_matrix, EfficiencyReport,
    QfiResult,
};
pub use grad::{
    grad_finite_difference, grad_reverse, grad_unitary_parameter_shift, GradientRecord,
};
pub use lcu::{lcu_apply_general, LcuDecomposition};
pub use statevec::{Bindings, Gate, GateKind, ParamRef, StateVector};
