//! Quantum Fisher information and parameter-efficiency metrics.
//!
//! The QFI matrix F_ij = 4 Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]
//! is evaluated from exact state derivatives. For wrapped variants the state
//! is the renormalized post-selected state, so its derivatives carry the
//! normalization's parameter dependence. The second term projects out global
//! phase; no extra gauge fixing is applied.

use crate::circuits::{layer_program, QuantumLayerSpec};
use crate::error::{Error, Result};
use crate::grad::state_derivatives;
use crate::linalg::symmetric_eigenvalues;
use crate::statevec::StateVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Symmetric positive-semidefinite QFI matrix and its trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QfiResult {
    pub matrix: Vec<Vec<f64>>,
    pub trace: f64,
}

impl QfiResult {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.matrix.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[i][j] - self.matrix[j][i]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        symmetric_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}

/// QFI of a layer at the given parameters and inputs.
///
/// The unitary baseline evaluates the circuit state directly; wrapped
/// variants evaluate the renormalized ancilla-0 branch.
pub fn qfi_matrix(spec: &QuantumLayerSpec, thetas: &[f64], inputs: &[f64]) -> Result<QfiResult> {
    let program = layer_program(spec);
    if spec.variant.is_wrapped() {
        qfi_matrix_postselected(&program, thetas, inputs)
    } else {
        qfi_matrix_program(&program, thetas, inputs)
    }
}

/// QFI of the raw circuit state of `program`.
pub fn qfi_matrix_program(
    program: &crate::circuits::CircuitProgram,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<QfiResult> {
    let (state, derivs) = state_derivatives(program, thetas, inputs)?;
    Ok(assemble(&state, &derivs))
}

/// QFI of the renormalized ancilla-0 branch of a wrapped program.
///
/// With |phi> = Pi|psi> and s = ||phi||, the normalized branch is |phi>/s
/// and its derivative is Pi|d_k psi>/s - |phi> Re<phi|Pi d_k psi>/s^3.
pub fn qfi_matrix_postselected(
    program: &crate::circuits::CircuitProgram,
    thetas: &[f64],
    inputs: &[f64],
) -> Result<QfiResult> {
    let (state, derivs) = state_derivatives(program, thetas, inputs)?;
    let dim = state.dim();
    let half = dim / 2;

    let project = |s: &StateVector| -> Vec<Complex64> {
        let mut amps = s.amplitudes().to_vec();
        for a in amps.iter_mut().skip(half) {
            *a = Complex64::new(0.0, 0.0);
        }
        amps
    };

    let phi = project(&state);
    let mass: f64 = phi.iter().map(|a| a.norm_sqr()).sum();
    if mass < 1e-12 {
        return Err(Error::DegeneratePostselection(mass));
    }
    let s = mass.sqrt();

    let normalized_amps: Vec<Complex64> = phi.iter().map(|a| a / s).collect();
    let normalized = StateVector::from_amplitudes(state.n_qubits(), normalized_amps)?;

    let mut normalized_derivs = Vec::with_capacity(derivs.len());
    for d in &derivs {
        let pd = project(d);
        // d s/d theta = Re<phi|Pi d psi> / s
        let overlap_re: f64 = phi
            .iter()
            .zip(&pd)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let amps: Vec<Complex64> = pd
            .iter()
            .zip(&phi)
            .map(|(dk, phik)| dk / s - phik * (overlap_re / (s * s * s)))
            .collect();
        normalized_derivs.push(StateVector::from_amplitudes(state.n_qubits(), amps)?);
    }
    Ok(assemble(&normalized, &normalized_derivs))
}

fn assemble(state: &StateVector, derivs: &[StateVector]) -> QfiResult {
    let p = derivs.len();
    let overlaps: Vec<Complex64> = derivs.iter().map(|d| state.inner(d)).collect();
    let mut matrix = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in i..p {
            let term = derivs[i].inner(&derivs[j]) - overlaps[i].conj() * overlaps[j];
            let value = 4.0 * term.re;
            matrix[i][j] = value;
            matrix[j][i] = value;
        }
    }
    let trace = (0..p).map(|i| matrix[i][i]).sum();
    QfiResult { matrix, trace }
}

/// Trace of the QFI: the effective information capacity of the circuit.
pub fn effective_dimension(qfi: &QfiResult) -> f64 {
    qfi.trace
}

/// Parameter-count Fisher efficiency in percent:
/// (N_classical - N_quantum) / N_classical * 100.
pub fn fisher_efficiency(n_classical: usize, n_quantum: usize) -> Result<f64> {
    if n_classical == 0 {
        return Err(Error::ZeroClassicalBaseline);
    }
    Ok((n_classical as f64 - n_quantum as f64) / n_classical as f64 * 100.0)
}

/// Performance-ratio efficiency in percent:
/// (perf_lcu - perf_nolcu) / perf_classical * 100.
pub fn fisher_efficiency_perf(acc_lcu: f64, acc_nolcu: f64, acc_classical: f64) -> Result<f64> {
    if acc_classical <= 0.0 {
        return Err(Error::ZeroClassicalBaseline);
    }
    Ok((acc_lcu - acc_nolcu) / acc_classical * 100.0)
}

/// Accuracy triple feeding the performance-ratio metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTriple {
    pub lcu: f64,
    pub nolcu: f64,
    pub classical: f64,
}

/// Both parameter-efficiency metrics side by side, serializable for result
/// tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub n_classical: usize,
    pub n_quantum: usize,
    /// Parameter-count form, percent.
    pub eta_param: f64,
    /// Performance-ratio form, percent.
    pub eta_perf: f64,
    pub accuracies: AccuracyTriple,
}

impl EfficiencyReport {
    pub fn new(
        n_classical: usize,
        n_quantum: usize,
        accuracies: AccuracyTriple,
    ) -> Result<EfficiencyReport> {
        Ok(EfficiencyReport {
            n_classical,
            n_quantum,
            eta_param: fisher_efficiency(n_classical, n_quantum)?,
            eta_perf: fisher_efficiency_perf(
                accuracies.lcu,
                accuracies.nolcu,
                accuracies.classical,
            )?,
            accuracies,
        })
    }
}
