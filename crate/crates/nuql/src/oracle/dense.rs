//! Dense-matrix oracle for circuit evaluation.
//!
//! Builds each gate as an explicit 2^n x 2^n matrix from textbook
//! definitions (Kronecker products and projector sums) and multiplies them
//! out. This path shares nothing with the stride-based amplitude updates in
//! `statevec`, which is the point: it is the independent reference the fast
//! path is checked against, both in tests and in the `verify` command.

use crate::circuits::CircuitProgram;
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::statevec::{Bindings, Gate, GateKind, StateVector};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn hadamard() -> CMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_rows(&[&[s, s], &[s, -s]])
}

fn pauli_x() -> CMatrix {
    CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

fn projector(bit: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2);
    m[(bit, bit)] = ONE;
    m
}

fn rotation(kind: GateKind, theta: f64) -> CMatrix {
    let m = crate::statevec::rotation_matrix(kind, theta);
    CMatrix::from_rows(&[&m[0], &m[1]])
}

/// Embed a single-qubit matrix at position `q` of an n-qubit register
/// (qubit 0 most significant).
fn embed_single(m: &CMatrix, q: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for pos in 0..n {
        let factor = if pos == q { m.clone() } else { CMatrix::identity(2) };
        out = out.kron(&factor);
    }
    out
}

/// Dense matrix of one gate on an n-qubit register.
pub fn gate_matrix(gate: &Gate, n_qubits: usize, values: &Bindings) -> Result<CMatrix> {
    let theta = match gate.slot {
        Some(slot) => values.resolve(slot)?,
        None => 0.0,
    };
    let base = match gate.kind {
        GateKind::H => embed_single(&hadamard(), gate.targets[0], n_qubits),
        GateKind::Rx | GateKind::Ry | GateKind::Rz => {
            embed_single(&rotation(gate.kind, theta), gate.targets[0], n_qubits)
        }
        GateKind::Cnot => {
            // P0_c (x) I + P1_c (x) X_t
            let c = gate.targets[0];
            let t = gate.targets[1];
            let keep = embed_single(&projector(0), c, n_qubits);
            let act = embed_single(&projector(1), c, n_qubits)
                .matmul(&embed_single(&pauli_x(), t, n_qubits));
            keep.add(&act)
        }
        GateKind::CzPhase => {
            // diag with e^{i theta} exactly on the |11> slice of both targets
            let a = gate.targets[0];
            let b = gate.targets[1];
            let phase = Complex64::from_polar(1.0, theta);
            let dim = 1usize << n_qubits;
            let mut m = CMatrix::identity(dim);
            for i in 0..dim {
                let bit_a = (i >> (n_qubits - 1 - a)) & 1;
                let bit_b = (i >> (n_qubits - 1 - b)) & 1;
                if bit_a == 1 && bit_b == 1 {
                    m[(i, i)] = phase;
                }
            }
            m
        }
    };
    Ok(match gate.control {
        None => base,
        Some(c) => {
            let keep = embed_single(&projector(0), c, n_qubits);
            let act = embed_single(&projector(1), c, n_qubits).matmul(&base);
            keep.add(&act)
        }
    })
}

/// Dense unitary of a whole program: the ordered product of its gate
/// matrices.
pub fn program_unitary(program: &CircuitProgram, values: &Bindings) -> Result<CMatrix> {
    let mut u = CMatrix::identity(1 << program.n_qubits);
    for gate in &program.gates {
        u = gate_matrix(gate, program.n_qubits, values)?.matmul(&u);
    }
    Ok(u)
}

/// Run a program by dense multiplication from |0...0>.
pub fn run_dense(program: &CircuitProgram, values: &Bindings) -> Result<StateVector> {
    let u = program_unitary(program, values)?;
    let mut column = vec![ZERO; u.dim];
    column[0] = ONE;
    let amps = u.matvec(&column);
    StateVector::from_amplitudes(program.n_qubits, amps)
}

/// Apply a dense matrix to a state (used to form reference states such as
/// (I + W)|psi> without touching the simulator path).
pub fn apply_matrix(m: &CMatrix, state: &StateVector) -> Result<StateVector> {
    StateVector::from_amplitudes(state.n_qubits(), m.matvec(state.amplitudes()))
}
