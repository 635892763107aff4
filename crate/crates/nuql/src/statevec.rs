//! Exact dense statevector simulator.
//!
//! States are length-2^n complex vectors over `n` qubits with qubit 0 as the
//! most significant bit of the amplitude index. All arithmetic is `f64`.
//! Gates mutate the state in place; every supported gate preserves the norm
//! except explicit post-selection, which renormalizes and reports the
//! projected probability mass.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Memory guard: 2^24 amplitudes is the largest state we allocate.
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which value bank a gate parameter is read from.
///
/// Trainable angles and data-encoding angles live in separate vectors so that
/// circuit builders can be composed without renumbering slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamRef {
    /// Index into the trainable parameter vector.
    Theta(usize),
    /// Index into the data-encoding (input feature) vector.
    Input(usize),
}

/// Supported gate kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    H,
    Rx,
    Ry,
    Rz,
    Cnot,
    /// Parameterized controlled-phase: diag(1, 1, 1, e^{i theta}).
    /// The plain CZ gate is the theta = pi case.
    CzPhase,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cnot",
            GateKind::CzPhase => "cz_phase",
        }
    }

    /// Parametric kinds carry exactly one slot, fixed kinds none.
    pub fn is_parametric(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::CzPhase
        )
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Cnot | GateKind::CzPhase => 2,
        }
    }
}

/// One gate in a circuit.
///
/// `control`, when set, restricts the action to the subspace where that qubit
/// is 1. This is how an ancilla-controlled sub-circuit is represented: every
/// gate of the sub-circuit carries the ancilla as its control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slot: Option<ParamRef>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub control: Option<usize>,
}

impl Gate {
    pub fn h(q: usize) -> Self {
        Gate { kind: GateKind::H, targets: vec![q], slot: None, control: None }
    }
    pub fn rx(q: usize, slot: ParamRef) -> Self {
        Gate { kind: GateKind::Rx, targets: vec![q], slot: Some(slot), control: None }
    }
    pub fn ry(q: usize, slot: ParamRef) -> Self {
        Gate { kind: GateKind::Ry, targets: vec![q], slot: Some(slot), control: None }
    }
    pub fn rz(q: usize, slot: ParamRef) -> Self {
        Gate { kind: GateKind::Rz, targets: vec![q], slot: Some(slot), control: None }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, targets: vec![control, target], slot: None, control: None }
    }
    pub fn cz_phase(a: usize, b: usize, slot: ParamRef) -> Self {
        Gate { kind: GateKind::CzPhase, targets: vec![a, b], slot: Some(slot), control: None }
    }

    /// Same gate with an extra control qubit attached.
    pub fn controlled_by(mut self, control: usize) -> Self {
        self.control = Some(control);
        self
    }

    /// Same gate with all qubit indices shifted up by `offset`.
    pub fn shifted(mut self, offset: usize) -> Self {
        for t in &mut self.targets {
            *t += offset;
        }
        if let Some(c) = &mut self.control {
            *c += offset;
        }
        self
    }

    /// Check target/control validity against a register size.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::LengthMismatch {
                what: "gate targets",
                expected: self.kind.arity(),
                got: self.targets.len(),
            });
        }
        let mut seen: Vec<usize> = Vec::with_capacity(3);
        for &q in self.targets.iter().chain(self.control.iter()) {
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
            if seen.contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
            seen.push(q);
        }
        match (self.kind.is_parametric(), self.slot.is_some()) {
            (true, false) => Err(Error::MissingSlot(self.kind.name())),
            (false, true) => Err(Error::UnexpectedSlot(self.kind.name())),
            _ => Ok(()),
        }
    }
}

/// Resolved parameter values for one circuit evaluation: trainable angles
/// plus data-encoding angles, both in radians.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    pub thetas: &'a [f64],
    pub inputs: &'a [f64],
}

impl<'a> Bindings<'a> {
    pub fn new(thetas: &'a [f64], inputs: &'a [f64]) -> Self {
        Bindings { thetas, inputs }
    }

    pub fn resolve(&self, slot: ParamRef) -> Result<f64> {
        match slot {
            ParamRef::Theta(i) => self.thetas.get(i).copied().ok_or(Error::UnresolvedSlot {
                slot: i,
                available: self.thetas.len(),
            }),
            ParamRef::Input(i) => self.inputs.get(i).copied().ok_or(Error::UnresolvedSlot {
                slot: i,
                available: self.inputs.len(),
            }),
        }
    }
}

/// Dense complex amplitude array over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits. Errors outside 1..=24.
    pub fn new_zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(n_qubits));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Build from explicit amplitudes; length must be 2^n_qubits.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(n_qubits));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::LengthMismatch {
                what: "amplitudes",
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Scale to unit norm. No-op direction is left to the caller; a zero
    /// state stays zero.
    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|^2 for unit vectors.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Bit value of `qubit` in amplitude index `idx` (qubit 0 = MSB).
    #[inline]
    fn bit(&self, idx: usize, qubit: usize) -> usize {
        (idx >> (self.n_qubits - 1 - qubit)) & 1
    }

    #[inline]
    fn stride(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// p_i = |a_i|^2 over the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// <Z_qubit> = sum over basis states of (+1 if bit 0 else -1) * p_i.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex { index: qubit, n_qubits: self.n_qubits });
        }
        let mut e = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if self.bit(i, qubit) == 0 {
                e += p;
            } else {
                e -= p;
            }
        }
        Ok(e)
    }

    /// Project onto `qubit == outcome`, renormalize, and return the
    /// pre-projection probability mass of that subspace.
    ///
    /// The returned state keeps the full register; the measured qubit is
    /// collapsed to `outcome`. A mass below 1e-12 is a degenerate
    /// post-selection error.
    pub fn postselect(&self, qubit: usize, outcome: usize) -> Result<(StateVector, f64)> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex { index: qubit, n_qubits: self.n_qubits });
        }
        let mut mass = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if self.bit(i, qubit) == outcome {
                mass += a.norm_sqr();
            }
        }
        if mass < 1e-12 {
            return Err(Error::DegeneratePostselection(mass));
        }
        let scale = 1.0 / mass.sqrt();
        let mut amps = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if self.bit(i, qubit) == outcome {
                amps[i] = a * scale;
            }
        }
        Ok((StateVector { n_qubits: self.n_qubits, amps }, mass))
    }

    /// Drop `qubit` (assumed collapsed to `outcome`) from the register,
    /// keeping the amplitudes of the matching subspace in index order.
    pub fn drop_qubit(&self, qubit: usize, outcome: usize) -> Result<StateVector> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex { index: qubit, n_qubits: self.n_qubits });
        }
        if self.n_qubits == 1 {
            return Err(Error::Capacity(0));
        }
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for (i, a) in self.amps.iter().enumerate() {
            if self.bit(i, qubit) == outcome {
                amps.push(*a);
            }
        }
        Ok(StateVector { n_qubits: self.n_qubits - 1, amps })
    }

    /// Draw one computational-basis outcome from |a_i|^2 by inverse CDF.
    pub fn sample_basis(&self, rng: &mut impl rand::Rng) -> usize {
        let r: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                return i;
            }
        }
        self.amps.len() - 1
    }

    /// Histogram of `shots` independent basis measurements.
    pub fn sample_counts(&self, shots: u64, rng: &mut impl rand::Rng) -> Vec<u64> {
        let mut counts = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            counts[self.sample_basis(rng)] += 1;
        }
        counts
    }

    /// Apply `gate` in place. Unitary on the full register (controlled gates
    /// included), so the norm is preserved.
    pub fn apply_gate(&mut self, gate: &Gate, values: &Bindings) -> Result<()> {
        self.apply_gate_dir(gate, values, Direction::Forward)
    }

    /// Apply the adjoint (inverse) of `gate` in place.
    pub fn apply_gate_adjoint(&mut self, gate: &Gate, values: &Bindings) -> Result<()> {
        self.apply_gate_dir(gate, values, Direction::Adjoint)
    }

    fn apply_gate_dir(&mut self, gate: &Gate, values: &Bindings, dir: Direction) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let theta = match gate.slot {
            Some(slot) => {
                let t = values.resolve(slot)?;
                match dir {
                    Direction::Forward => t,
                    Direction::Adjoint => -t,
                }
            }
            None => 0.0,
        };
        match gate.kind {
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let m = [
                    [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
                ];
                self.apply_single(gate.targets[0], &m, gate.control);
            }
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let m = rotation_matrix(gate.kind, theta);
                self.apply_single(gate.targets[0], &m, gate.control);
            }
            GateKind::Cnot => {
                self.apply_cnot(gate.targets[0], gate.targets[1], gate.control);
            }
            GateKind::CzPhase => {
                let phase = Complex64::from_polar(1.0, theta);
                self.apply_phase_on_11(gate.targets[0], gate.targets[1], phase, gate.control);
            }
        }
        Ok(())
    }

    /// Apply dU/dtheta of a parametric gate in place. The result is not
    /// unitary; for a controlled gate the control-0 subspace is annihilated
    /// (d/dtheta of the identity branch is zero).
    pub fn apply_gate_deriv(&mut self, gate: &Gate, values: &Bindings) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let slot = gate.slot.ok_or(Error::MissingSlot(gate.kind.name()))?;
        let theta = values.resolve(slot)?;
        match gate.kind {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let m = rotation_matrix_deriv(gate.kind, theta);
                if let Some(c) = gate.control {
                    self.zero_control_branch(c, 0);
                }
                self.apply_single(gate.targets[0], &m, gate.control);
            }
            GateKind::CzPhase => {
                // d/dtheta diag(1,1,1,e^{i theta}) = diag(0,0,0, i e^{i theta})
                let a = gate.targets[0];
                let b = gate.targets[1];
                let dphase = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, theta);
                for i in 0..self.amps.len() {
                    let on = self.bit(i, a) == 1
                        && self.bit(i, b) == 1
                        && gate.control.map_or(true, |c| self.bit(i, c) == 1);
                    if on {
                        self.amps[i] *= dphase;
                    } else {
                        self.amps[i] = ZERO;
                    }
                }
            }
            GateKind::H | GateKind::Cnot => {
                return Err(Error::MissingSlot(gate.kind.name()));
            }
        }
        Ok(())
    }

    fn zero_control_branch(&mut self, control: usize, branch: usize) {
        for i in 0..self.amps.len() {
            if self.bit(i, control) == branch {
                self.amps[i] = ZERO;
            }
        }
    }

    fn apply_single(&mut self, q: usize, m: &[[Complex64; 2]; 2], control: Option<usize>) {
        let stride = self.stride(q);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for offset in base..base + stride {
                let i0 = offset;
                let i1 = offset + stride;
                if let Some(c) = control {
                    if self.bit(i0, c) == 0 {
                        continue;
                    }
                }
                let a0 = self.amps[i0];
                let a1 = self.amps[i1];
                self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += stride * 2;
        }
    }

    fn apply_cnot(&mut self, ctrl: usize, tgt: usize, control: Option<usize>) {
        let stride = self.stride(tgt);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for offset in base..base + stride {
                let i0 = offset;
                let i1 = offset + stride;
                if self.bit(i0, ctrl) != 1 {
                    continue;
                }
                if let Some(c) = control {
                    if self.bit(i0, c) == 0 {
                        continue;
                    }
                }
                self.amps.swap(i0, i1);
            }
            base += stride * 2;
        }
    }

    fn apply_phase_on_11(&mut self, a: usize, b: usize, phase: Complex64, control: Option<usize>) {
        for i in 0..self.amps.len() {
            if self.bit(i, a) == 1
                && self.bit(i, b) == 1
                && control.map_or(true, |c| self.bit(i, c) == 1)
            {
                self.amps[i] *= phase;
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Adjoint,
}

/// Standard half-angle rotation matrices: R(theta) = exp(-i theta G / 2).
pub fn rotation_matrix(kind: GateKind, theta: f64) -> [[Complex64; 2]; 2] {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    match kind {
        GateKind::Rx => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::Ry => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::Rz => [
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ],
        _ => unreachable!("not a rotation gate"),
    }
}

fn rotation_matrix_deriv(kind: GateKind, theta: f64) -> [[Complex64; 2]; 2] {
    let c = (theta / 2.0).cos() / 2.0;
    let s = (theta / 2.0).sin() / 2.0;
    match kind {
        GateKind::Rx => [
            [Complex64::new(-s, 0.0), Complex64::new(0.0, -c)],
            [Complex64::new(0.0, -c), Complex64::new(-s, 0.0)],
        ],
        GateKind::Ry => [
            [Complex64::new(-s, 0.0), Complex64::new(-c, 0.0)],
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        ],
        GateKind::Rz => {
            let half = Complex64::new(0.0, 0.5);
            [
                [-half * Complex64::from_polar(1.0, -theta / 2.0), ZERO],
                [ZERO, half * Complex64::from_polar(1.0, theta / 2.0)],
            ]
        }
        _ => unreachable!("not a rotation gate"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const NO_VALUES: Bindings = Bindings { thetas: &[], inputs: &[] };

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn zero_state_is_all_in_first_amplitude() {
        let s = StateVector::new_zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO]);
        let s = StateVector::new_zero_state(2).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn capacity_bounds_enforced() {
        assert!(matches!(StateVector::new_zero_state(25), Err(Error::Capacity(25))));
        assert!(matches!(StateVector::new_zero_state(0), Err(Error::Capacity(0))));
        assert!(StateVector::new_zero_state(24).is_ok());
    }

    #[test]
    fn hadamard_makes_plus_state() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&Gate::h(0), &NO_VALUES).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes()[0].re, r, 1e-12));
        assert!(close(s.amplitudes()[1].re, r, 1e-12));
    }

    #[test]
    fn cnot_truth_table() {
        // |10> -> |11> with qubit 0 as control (MSB)
        let mut s = StateVector::from_amplitudes(2, vec![ZERO, ZERO, ONE, ZERO]).unwrap();
        s.apply_gate(&Gate::cnot(0, 1), &NO_VALUES).unwrap();
        assert!(close(s.amplitudes()[3].re, 1.0, 1e-15));
        // |00> untouched
        let mut s = StateVector::new_zero_state(2).unwrap();
        s.apply_gate(&Gate::cnot(0, 1), &NO_VALUES).unwrap();
        assert!(close(s.amplitudes()[0].re, 1.0, 1e-15));
    }

    #[test]
    fn ry_matches_dense_two_by_two() {
        let theta = PI / 3.0;
        let mut s = StateVector::new_zero_state(1).unwrap();
        let thetas = [theta];
        let vals = Bindings::new(&thetas, &[]);
        s.apply_gate(&Gate::ry(0, ParamRef::Theta(0)), &vals).unwrap();
        assert!(close(s.amplitudes()[0].re, (theta / 2.0).cos(), 1e-15));
        assert!(close(s.amplitudes()[1].re, (theta / 2.0).sin(), 1e-15));
        // <Z> after RY(pi/3) is cos(pi/3) = 0.5
        assert!(close(s.expectation_z(0).unwrap(), 0.5, 1e-12));
    }

    #[test]
    fn probabilities_recompute_amplitude_moduli() {
        let amps = vec![
            Complex64::new(0.3, 0.4),
            Complex64::new(0.1, -0.2),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 0.2),
            Complex64::new(0.2, 0.1),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.1),
        ];
        let mut s = StateVector::from_amplitudes(3, amps).unwrap();
        s.normalize();
        let p = s.probabilities();
        for (pi, a) in p.iter().zip(s.amplitudes()) {
            assert!(close(*pi, a.norm_sqr(), 1e-15));
        }
        assert!(close(p.iter().sum::<f64>(), 1.0, 1e-12));
    }

    #[test]
    fn expectation_bounds_and_plus_state() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        assert!(close(s.expectation_z(0).unwrap(), 1.0, 1e-15));
        s.apply_gate(&Gate::h(0), &NO_VALUES).unwrap();
        assert!(close(s.expectation_z(0).unwrap(), 0.0, 1e-12));
        assert!(s.expectation_z(1).is_err());
    }

    #[test]
    fn postselect_product_state_is_identity() {
        // |0> (x) |psi>, select qubit 0 = 0 keeps |psi> with mass 1
        let mut s = StateVector::new_zero_state(2).unwrap();
        let vals = Bindings::new(&[0.7], &[]);
        s.apply_gate(&Gate::ry(1, ParamRef::Theta(0)), &vals).unwrap();
        let (post, mass) = s.postselect(0, 0).unwrap();
        assert!(close(mass, 1.0, 1e-12));
        assert!(close(post.fidelity(&s), 1.0, 1e-12));
    }

    #[test]
    fn postselect_balanced_superposition() {
        // (|0>|0> + |1>|1>)/sqrt(2), outcome 0 -> |00> with mass 0.5
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(
            2,
            vec![Complex64::new(r, 0.0), ZERO, ZERO, Complex64::new(r, 0.0)],
        )
        .unwrap();
        let (post, mass) = s.postselect(0, 0).unwrap();
        assert!(close(mass, 0.5, 1e-12));
        assert!(close(post.amplitudes()[0].re, 1.0, 1e-12));
        assert!(close(post.norm_sqr(), 1.0, 1e-12));
    }

    #[test]
    fn postselect_annihilation_is_degenerate() {
        let s = StateVector::from_amplitudes(1, vec![ONE, ZERO]).unwrap();
        assert!(matches!(
            s.postselect(0, 1),
            Err(Error::DegeneratePostselection(_))
        ));
    }

    #[test]
    fn postselect_mass_equals_subspace_probability_sum() {
        let mut s = StateVector::new_zero_state(3).unwrap();
        let vals = Bindings::new(&[1.1, 2.3, 0.4], &[]);
        s.apply_gate(&Gate::h(0), &NO_VALUES).unwrap();
        s.apply_gate(&Gate::ry(1, ParamRef::Theta(0)), &vals).unwrap();
        s.apply_gate(&Gate::rx(2, ParamRef::Theta(1)), &vals).unwrap();
        s.apply_gate(&Gate::cnot(0, 2), &NO_VALUES).unwrap();
        let (_, mass) = s.postselect(1, 0).unwrap();
        let direct: f64 = s
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> 1) & 1 == 0)
            .map(|(_, p)| p)
            .sum();
        assert!(close(mass, direct, 1e-15));
    }

    #[test]
    fn gate_involutions() {
        let mut s = StateVector::new_zero_state(3).unwrap();
        let vals = Bindings::new(&[0.9, 1.7], &[]);
        s.apply_gate(&Gate::ry(0, ParamRef::Theta(0)), &vals).unwrap();
        s.apply_gate(&Gate::rx(2, ParamRef::Theta(1)), &vals).unwrap();
        let before = s.clone();
        for g in [Gate::h(1), Gate::cnot(0, 2)] {
            s.apply_gate(&g, &NO_VALUES).unwrap();
            s.apply_gate(&g, &NO_VALUES).unwrap();
            assert!(close(s.fidelity(&before), 1.0, 1e-12));
        }
    }

    #[test]
    fn norm_preserved_across_gate_sequence() {
        let mut s = StateVector::new_zero_state(4).unwrap();
        let thetas: Vec<f64> = (0..8).map(|i| 0.37 * (i as f64 + 1.0)).collect();
        let vals = Bindings::new(&thetas, &[]);
        let gates = vec![
            Gate::h(0),
            Gate::rx(1, ParamRef::Theta(0)),
            Gate::ry(2, ParamRef::Theta(1)),
            Gate::rz(3, ParamRef::Theta(2)),
            Gate::cnot(0, 1),
            Gate::cz_phase(1, 3, ParamRef::Theta(3)),
            Gate::rx(0, ParamRef::Theta(4)).controlled_by(2),
            Gate::cnot(2, 3).controlled_by(0),
            Gate::cz_phase(0, 2, ParamRef::Theta(5)).controlled_by(1),
        ];
        for g in &gates {
            s.apply_gate(g, &vals).unwrap();
            assert!(close(s.norm_sqr(), 1.0, 1e-10));
        }
    }

    #[test]
    fn adjoint_undoes_gate() {
        let thetas = [1.234];
        let vals = Bindings::new(&thetas, &[]);
        for g in [
            Gate::h(1),
            Gate::rx(0, ParamRef::Theta(0)),
            Gate::rz(2, ParamRef::Theta(0)),
            Gate::cnot(1, 2),
            Gate::cz_phase(0, 2, ParamRef::Theta(0)),
            Gate::ry(1, ParamRef::Theta(0)).controlled_by(0),
        ] {
            let mut s = StateVector::new_zero_state(3).unwrap();
            s.apply_gate(&Gate::h(0), &NO_VALUES).unwrap();
            s.apply_gate(&Gate::h(1), &NO_VALUES).unwrap();
            s.apply_gate(&Gate::h(2), &NO_VALUES).unwrap();
            let before = s.clone();
            s.apply_gate(&g, &vals).unwrap();
            s.apply_gate_adjoint(&g, &vals).unwrap();
            assert!(close(s.fidelity(&before), 1.0, 1e-12));
        }
    }

    #[test]
    fn invalid_targets_rejected() {
        let mut s = StateVector::new_zero_state(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::h(2), &NO_VALUES),
            Err(Error::QubitIndex { .. })
        ));
        assert!(matches!(
            s.apply_gate(&Gate::cnot(1, 1), &NO_VALUES),
            Err(Error::DuplicateQubit(1))
        ));
    }

    #[test]
    fn unresolved_slot_rejected() {
        let mut s = StateVector::new_zero_state(1).unwrap();
        let err = s.apply_gate(&Gate::rx(0, ParamRef::Theta(3)), &NO_VALUES);
        assert!(matches!(err, Err(Error::UnresolvedSlot { slot: 3, .. })));
    }

    #[test]
    fn rz_two_pi_is_minus_identity() {
        // RZ(2 pi) = -I exactly; used elsewhere to express W = -I.
        let vals = Bindings::new(&[2.0 * PI], &[]);
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_gate(&Gate::h(0), &NO_VALUES).unwrap();
        let before = s.clone();
        s.apply_gate(&Gate::rz(0, ParamRef::Theta(0)), &vals).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a + b).norm() < 1e-12);
        }
    }
}
