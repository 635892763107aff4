//! Circuit builders and layer evaluation.
//!
//! Compiles the supported quantum layer families into [`CircuitProgram`]
//! values: angle embedding, the blocked RX + forward-CNOT ansatz, the
//! ancilla-controlled LCU wrapper, and both IQP variants. Also provides the
//! forward passes: a plain unitary evaluation and the post-selected
//! non-unitary evaluation that realizes the effective (I + W)/2 map.

use crate::error::{Error, Result};
use crate::statevec::{Bindings, Gate, ParamRef, StateVector};
use serde::{Deserialize, Serialize};

/// Quantum layer families.
///
/// `NoLcu` is the unitary baseline; the other three wrap their variational
/// circuit in the single-ancilla LCU construction and post-select ancilla 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerVariant {
    NoLcu,
    Lcu,
    IqpLayer,
    IqpEmbedding,
}

impl LayerVariant {
    pub fn name(self) -> &'static str {
        match self {
            LayerVariant::NoLcu => "nolcu",
            LayerVariant::Lcu => "lcu",
            LayerVariant::IqpLayer => "iqp_layer",
            LayerVariant::IqpEmbedding => "iqp_embedding",
        }
    }

    /// Whether the variant carries the ancilla wrapper and post-selection.
    pub fn is_wrapped(self) -> bool {
        !matches!(self, LayerVariant::NoLcu)
    }
}

/// Declarative description of one quantum layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumLayerSpec {
    pub variant: LayerVariant,
    /// Main-register qubit count N (the ancilla is extra).
    pub n_qubits: usize,
    /// Variational block count for the RX/CNOT ansatz; ignored by IQP variants.
    #[serde(default = "default_blocks")]
    pub n_blocks: usize,
}

fn default_blocks() -> usize {
    4
}

impl QuantumLayerSpec {
    pub fn new(variant: LayerVariant, n_qubits: usize) -> Self {
        QuantumLayerSpec { variant, n_qubits, n_blocks: 4 }
    }

    pub fn with_blocks(mut self, n_blocks: usize) -> Self {
        self.n_blocks = n_blocks;
        self
    }

    /// Trainable parameter count: blocks*N for the RX/CNOT ansatz,
    /// 2N (N > 2) or 2N-1 (N <= 2) for IQP circuits.
    pub fn n_params(&self) -> usize {
        match self.variant {
            LayerVariant::NoLcu | LayerVariant::Lcu => self.n_blocks * self.n_qubits,
            LayerVariant::IqpLayer | LayerVariant::IqpEmbedding => {
                iqp_param_count(self.n_qubits)
            }
        }
    }

    /// Data-encoding slot count: N angle-embedding features, except the IQP
    /// embedding which consumes 2N-1 features (N phase rotations plus N-1
    /// ring phases).
    pub fn n_inputs(&self) -> usize {
        match self.variant {
            LayerVariant::IqpEmbedding => 2 * self.n_qubits - 1,
            _ => self.n_qubits,
        }
    }
}

/// Trainable parameter count of one IQP block under the wrap rule: the ring
/// closes with an extra controlled-phase only for N > 2.
pub fn iqp_param_count(n_qubits: usize) -> usize {
    if n_qubits > 2 {
        2 * n_qubits
    } else {
        2 * n_qubits - 1
    }
}

/// Gate count of the embedded RX/CNOT circuit: N encoding rotations plus
/// blocks * (N rotations + N-1 CNOTs). Four blocks give 9N - 4.
pub fn standard_gate_count(n_qubits: usize, n_blocks: usize) -> usize {
    n_qubits + n_blocks * (2 * n_qubits - 1)
}

/// Conventional gate tally for the wrapped circuit: two ancilla Hadamards,
/// the 9N-4 variational circuit, and one extra block charged for making its
/// gates controlled. Evaluates to 11N - 3, usually quoted as "about
/// 11N - 2".
pub fn lcu_wrapped_gate_tally(n_qubits: usize) -> usize {
    2 + standard_gate_count(n_qubits, 4) + (2 * n_qubits - 1)
}

/// Ordered gate list with typed parameter slots.
///
/// `n_encoding_gates` marks the data-encoding prefix; the LCU wrapper leaves
/// that prefix uncontrolled on the main qubits and controls everything after
/// it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitProgram {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
    pub n_inputs: usize,
    pub n_encoding_gates: usize,
}

impl CircuitProgram {
    pub fn empty(n_qubits: usize) -> Self {
        CircuitProgram {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
            n_inputs: 0,
            n_encoding_gates: 0,
        }
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Check gate targets and slot ranges.
    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            gate.validate(self.n_qubits)?;
            match gate.slot {
                Some(ParamRef::Theta(i)) if i >= self.n_params => {
                    return Err(Error::UnresolvedSlot { slot: i, available: self.n_params })
                }
                Some(ParamRef::Input(i)) if i >= self.n_inputs => {
                    return Err(Error::UnresolvedSlot { slot: i, available: self.n_inputs })
                }
                _ => {}
            }
        }
        if self.n_encoding_gates > self.gates.len() {
            return Err(Error::Config(
                "encoding prefix longer than gate list".into(),
            ));
        }
        Ok(())
    }

    fn check_bindings(&self, values: &Bindings) -> Result<()> {
        if values.thetas.len() != self.n_params {
            return Err(Error::LengthMismatch {
                what: "trainable parameters",
                expected: self.n_params,
                got: values.thetas.len(),
            });
        }
        if values.inputs.len() != self.n_inputs {
            return Err(Error::LengthMismatch {
                what: "input features",
                expected: self.n_inputs,
                got: values.inputs.len(),
            });
        }
        Ok(())
    }

    /// Apply all gates to an existing state.
    pub fn apply_to(&self, state: &mut StateVector, values: &Bindings) -> Result<()> {
        self.check_bindings(values)?;
        for gate in &self.gates {
            state.apply_gate(gate, values)?;
        }
        Ok(())
    }

    /// Run from |0...0>.
    pub fn run(&self, values: &Bindings) -> Result<StateVector> {
        let mut state = StateVector::new_zero_state(self.n_qubits)?;
        self.apply_to(&mut state, values)?;
        Ok(state)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let program: CircuitProgram = serde_json::from_str(text)?;
        program.validate()?;
        Ok(program)
    }

    /// Concatenate two programs on the same register. Slot banks are typed,
    /// so no renumbering happens; counts take the maximum of both parts.
    /// Encoding gates must stay a prefix of the composite.
    pub fn compose(&self, other: &CircuitProgram) -> Result<CircuitProgram> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch {
                what: "qubits",
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        let n_encoding_gates = if self.n_encoding_gates == self.gates.len() {
            self.n_encoding_gates + other.n_encoding_gates
        } else if other.n_encoding_gates == 0 {
            self.n_encoding_gates
        } else {
            return Err(Error::Config(
                "cannot compose: encoding gates would not form a prefix".into(),
            ));
        };
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(CircuitProgram {
            n_qubits: self.n_qubits,
            gates,
            n_params: self.n_params.max(other.n_params),
            n_inputs: self.n_inputs.max(other.n_inputs),
            n_encoding_gates,
        })
    }
}

/// Angle embedding: RY(x_i) on qubit i. N input slots, no trainable slots.
pub fn build_angle_embedding(n_qubits: usize) -> CircuitProgram {
    let gates: Vec<Gate> = (0..n_qubits)
        .map(|q| Gate::ry(q, ParamRef::Input(q)))
        .collect();
    CircuitProgram {
        n_qubits,
        n_encoding_gates: gates.len(),
        gates,
        n_params: 0,
        n_inputs: n_qubits,
    }
}

/// Blocked variational circuit: per block, RX on every qubit then forward
/// CNOTs (qubit i controls qubit i+1). One trainable slot per qubit per block.
pub fn build_variational_ansatz(n_qubits: usize, n_blocks: usize) -> CircuitProgram {
    let mut gates = Vec::with_capacity(n_blocks * (2 * n_qubits).saturating_sub(1));
    let mut slot = 0;
    for _ in 0..n_blocks {
        for q in 0..n_qubits {
            gates.push(Gate::rx(q, ParamRef::Theta(slot)));
            slot += 1;
        }
        for q in 0..n_qubits.saturating_sub(1) {
            gates.push(Gate::cnot(q, q + 1));
        }
    }
    CircuitProgram {
        n_qubits,
        gates,
        n_params: slot,
        n_inputs: 0,
        n_encoding_gates: 0,
    }
}

/// One IQP block: H on all qubits, RZ on each qubit, controlled-phase ring
/// (i, i+1), the wrap phase (N-1, 0) when `wrap` and N > 2, then H again.
/// Slots are trainable, numbered from `slot_base`.
pub fn build_iqp_block(n_qubits: usize, slot_base: usize) -> CircuitProgram {
    let gates = iqp_gates(n_qubits, true, |j| ParamRef::Theta(slot_base + j));
    CircuitProgram {
        n_qubits,
        gates,
        n_params: slot_base + iqp_param_count(n_qubits),
        n_inputs: 0,
        n_encoding_gates: 0,
    }
}

/// Data-encoding IQP block: same diagonal structure bound to input features,
/// ring topology only, so it consumes exactly 2N-1 features for every N.
pub fn build_iqp_data_block(n_qubits: usize) -> CircuitProgram {
    let gates = iqp_gates(n_qubits, false, ParamRef::Input);
    CircuitProgram {
        n_qubits,
        n_encoding_gates: gates.len(),
        gates,
        n_params: 0,
        n_inputs: 2 * n_qubits - 1,
    }
}

fn iqp_gates(n_qubits: usize, wrap: bool, slot: impl Fn(usize) -> ParamRef) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 0..n_qubits {
        gates.push(Gate::h(q));
    }
    let mut j = 0;
    for q in 0..n_qubits {
        gates.push(Gate::rz(q, slot(j)));
        j += 1;
    }
    for q in 0..n_qubits.saturating_sub(1) {
        gates.push(Gate::cz_phase(q, q + 1, slot(j)));
        j += 1;
    }
    if wrap && n_qubits > 2 {
        gates.push(Gate::cz_phase(n_qubits - 1, 0, slot(j)));
    }
    for q in 0..n_qubits {
        gates.push(Gate::h(q));
    }
    gates
}

/// Wrap a main-register program in the single-ancilla LCU construction.
///
/// The result acts on N+1 qubits with the ancilla at index 0: Hadamard on the
/// ancilla, the data-encoding prefix applied unconditionally to the shifted
/// main qubits, every remaining gate controlled on the ancilla, and a closing
/// ancilla Hadamard. Post-selecting ancilla 0 afterwards realizes
/// (I + W)|psi> up to normalization.
pub fn build_lcu_wrapped(main: &CircuitProgram) -> CircuitProgram {
    let mut gates = Vec::with_capacity(main.gates.len() + 2);
    gates.push(Gate::h(0));
    for (i, gate) in main.gates.iter().enumerate() {
        let shifted = gate.clone().shifted(1);
        if i < main.n_encoding_gates {
            gates.push(shifted);
        } else {
            gates.push(shifted.controlled_by(0));
        }
    }
    gates.push(Gate::h(0));
    CircuitProgram {
        n_qubits: main.n_qubits + 1,
        n_encoding_gates: 1 + main.n_encoding_gates,
        gates,
        n_params: main.n_params,
        n_inputs: main.n_inputs,
    }
}

/// The full IQP-embedding model: a data-encoding IQP block (2N-1 features,
/// ring only) followed by a trainable IQP block (wrap rule applies), the
/// whole composite wrapped in the single-ancilla LCU construction.
pub fn build_iqp_embedding_model(n_qubits: usize) -> CircuitProgram {
    layer_program(&QuantumLayerSpec::new(LayerVariant::IqpEmbedding, n_qubits))
}

/// The unwrapped main-register circuit of a layer (embedding plus W).
pub fn main_program(spec: &QuantumLayerSpec) -> CircuitProgram {
    let n = spec.n_qubits;
    let program = match spec.variant {
        LayerVariant::NoLcu | LayerVariant::Lcu => build_angle_embedding(n)
            .compose(&build_variational_ansatz(n, spec.n_blocks)),
        LayerVariant::IqpLayer => build_angle_embedding(n).compose(&build_iqp_block(n, 0)),
        LayerVariant::IqpEmbedding => build_iqp_data_block(n).compose(&build_iqp_block(n, 0)),
    };
    program.expect("builder programs share a register")
}

/// The executable circuit of a layer: the main program for the unitary
/// baseline, the ancilla-wrapped program for everything else.
pub fn layer_program(spec: &QuantumLayerSpec) -> CircuitProgram {
    let main = main_program(spec);
    if spec.variant.is_wrapped() {
        build_lcu_wrapped(&main)
    } else {
        main
    }
}

/// Run a wrapped program and project onto ancilla 0, returning the
/// renormalized main-register state and the success probability.
pub fn run_postselected(wrapped: &CircuitProgram, values: &Bindings) -> Result<(StateVector, f64)> {
    let full = wrapped.run(values)?;
    let (projected, mass) = full.postselect(0, 0)?;
    Ok((projected.drop_qubit(0, 0)?, mass))
}

/// Unitary forward pass: <Z_i> on every main qubit of the unwrapped circuit.
pub fn forward_unitary(
    spec: &QuantumLayerSpec,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<Vec<f64>> {
    let program = main_program(spec);
    let state = program.run(&Bindings::new(thetas, inputs))?;
    (0..spec.n_qubits).map(|q| state.expectation_z(q)).collect()
}

/// Non-unitary forward pass: <Z_i> on the renormalized post-selected state,
/// plus the ancilla-0 success probability. The unitary baseline degenerates
/// to the plain forward pass with success probability 1.
pub fn forward_nonunitary(
    spec: &QuantumLayerSpec,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if !spec.variant.is_wrapped() {
        return Ok((forward_unitary(spec, thetas, inputs)?, 1.0));
    }
    let wrapped = layer_program(spec);
    let (post, mass) = run_postselected(&wrapped, &Bindings::new(thetas, inputs))?;
    let expectations: Result<Vec<f64>> =
        (0..spec.n_qubits).map(|q| post.expectation_z(q)).collect();
    Ok((expectations?, mass))
}

/// Shot-sampled forward pass: measure the full register `shots` times,
/// filter for ancilla 0, and estimate the expectations and the acceptance
/// probability from the accepted counts. The unitary baseline samples its
/// own distribution with every shot accepted. Zero accepted shots is a
/// degenerate post-selection.
///
/// This models measurement shot noise; training always uses the exact pass.
pub fn forward_nonunitary_sampled(
    spec: &QuantumLayerSpec,
    thetas: &[f64],
    inputs: &[f64],
    shots: u64,
    rng: &mut impl rand::Rng,
) -> Result<(Vec<f64>, f64)> {
    if shots == 0 {
        return Err(Error::Config("shot count must be positive".into()));
    }
    let program = layer_program(spec);
    let state = program.run(&Bindings::new(thetas, inputs))?;
    let counts = state.sample_counts(shots, rng);
    let n_qubits = program.n_qubits;
    let wrapped = spec.variant.is_wrapped();

    let mut accepted = 0u64;
    let mut z_sums = vec![0.0f64; spec.n_qubits];
    for (index, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        if wrapped && (index >> (n_qubits - 1)) & 1 == 1 {
            continue; // ancilla fired
        }
        accepted += count;
        for q in 0..spec.n_qubits {
            let absolute = if wrapped { q + 1 } else { q };
            let bit = (index >> (n_qubits - 1 - absolute)) & 1;
            let sign = if bit == 0 { 1.0 } else { -1.0 };
            z_sums[q] += sign * count as f64;
        }
    }
    if accepted == 0 {
        return Err(Error::DegeneratePostselection(0.0));
    }
    let expectations = z_sums.iter().map(|s| s / accepted as f64).collect();
    let success = if wrapped { accepted as f64 / shots as f64 } else { 1.0 };
    Ok((expectations, success))
}
