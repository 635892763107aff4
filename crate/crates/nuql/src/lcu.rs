//! General linear-combination-of-unitaries application.
//!
//! Implements the K-term construction: an ancilla register of ceil(log2 K)
//! qubits is prepared with amplitudes sqrt(alpha_k / sum alpha), controlled
//! unitaries apply U_k on the branch |k>, the preparation is uncomputed, and
//! the ancillas are post-selected on |0...0>. The surviving main-register
//! state is proportional to sum_k alpha_k U_k |psi>.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::statevec::StateVector;
use num_complex::Complex64;

/// Coefficients and dense unitary operands of a target operator
/// sum_k alpha_k U_k.
#[derive(Debug, Clone)]
pub struct LcuDecomposition {
    pub coefficients: Vec<f64>,
    pub unitaries: Vec<CMatrix>,
}

impl LcuDecomposition {
    pub fn new(coefficients: Vec<f64>, unitaries: Vec<CMatrix>) -> Self {
        LcuDecomposition { coefficients, unitaries }
    }

    /// Number of terms K.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// All alpha_k strictly positive, matching lengths, operands unitary
    /// within 1e-9 and sized for `main_dim`.
    pub fn validate(&self, main_dim: usize) -> Result<()> {
        if self.coefficients.is_empty() {
            return Err(Error::InvalidDecomposition("no terms".into()));
        }
        if self.coefficients.len() != self.unitaries.len() {
            return Err(Error::InvalidDecomposition(format!(
                "{} coefficients vs {} unitaries",
                self.coefficients.len(),
                self.unitaries.len()
            )));
        }
        for (k, &alpha) in self.coefficients.iter().enumerate() {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::InvalidDecomposition(format!(
                    "coefficient {k} must be positive and finite, got {alpha}"
                )));
            }
        }
        for (k, u) in self.unitaries.iter().enumerate() {
            if u.dim != main_dim {
                return Err(Error::InvalidDecomposition(format!(
                    "unitary {k} has dimension {} for a register of dimension {main_dim}",
                    u.dim
                )));
            }
            let defect = u.unitarity_defect();
            if defect > 1e-9 {
                return Err(Error::InvalidDecomposition(format!(
                    "unitary {k} fails the unitarity check (defect {defect:.3e})"
                )));
            }
        }
        Ok(())
    }
}

/// Apply the decomposition to `input` through the prepare/select/unprepare
/// circuit and post-select the ancilla register on |0...0>.
///
/// Returns the renormalized main-register state and the exact projective
/// probability mass of the accepted outcome.
pub fn lcu_apply_general(
    decomp: &LcuDecomposition,
    input: &StateVector,
) -> Result<(StateVector, f64)> {
    let main_dim = input.dim();
    decomp.validate(main_dim)?;

    let k_terms = decomp.len();
    let anc_qubits = ceil_log2(k_terms);
    let anc_dim = 1usize << anc_qubits;

    let total: f64 = decomp.coefficients.iter().sum();
    let mut prep_column = vec![0.0; anc_dim];
    for (k, &alpha) in decomp.coefficients.iter().enumerate() {
        prep_column[k] = (alpha / total).sqrt();
    }

    // Full register: ancillas on top (most significant), main below.
    // blocks[a] holds the main-register amplitudes of ancilla branch |a>.
    let mut blocks: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); main_dim]; anc_dim];
    blocks[0] = input.amplitudes().to_vec();

    let prep = householder_from_column(&prep_column);

    apply_on_ancilla(&mut blocks, &prep);
    for (k, u) in decomp.unitaries.iter().enumerate() {
        blocks[k] = u.matvec(&blocks[k]);
    }
    // the Householder reflection is self-inverse, so unprepare reapplies it
    apply_on_ancilla(&mut blocks, &prep);

    let mass: f64 = blocks[0].iter().map(|a| a.norm_sqr()).sum();
    if mass < 1e-12 {
        return Err(Error::DegeneratePostselection(mass));
    }
    let scale = 1.0 / mass.sqrt();
    let amps: Vec<Complex64> = blocks[0].iter().map(|a| a * scale).collect();
    Ok((StateVector::from_amplitudes(input.n_qubits(), amps)?, mass))
}

fn ceil_log2(k: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < k {
        bits += 1;
    }
    bits
}

/// Real orthogonal reflection mapping e_0 to the given unit column.
fn householder_from_column(column: &[f64]) -> Vec<Vec<f64>> {
    let dim = column.len();
    let mut v: Vec<f64> = column.to_vec();
    v[0] -= 1.0; // v = c - e_0
    let vnorm: f64 = v.iter().map(|x| x * x).sum();
    let mut p = vec![vec![0.0; dim]; dim];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if vnorm > 1e-30 {
        let scale = 2.0 / vnorm;
        for i in 0..dim {
            for j in 0..dim {
                p[i][j] -= scale * v[i] * v[j];
            }
        }
    }
    p
}

fn apply_on_ancilla(blocks: &mut [Vec<Complex64>], matrix: &[Vec<f64>]) {
    let anc_dim = blocks.len();
    if anc_dim <= 1 {
        return;
    }
    let main_dim = blocks[0].len();
    let mut out: Vec<Vec<Complex64>> =
        vec![vec![Complex64::new(0.0, 0.0); main_dim]; anc_dim];
    for (a, out_block) in out.iter_mut().enumerate() {
        for (b, block) in blocks.iter().enumerate() {
            let w = matrix[a][b];
            if w == 0.0 {
                continue;
            }
            for (o, x) in out_block.iter_mut().zip(block) {
                *o += x * w;
            }
        }
    }
    for (dst, src) in blocks.iter_mut().zip(out) {
        *dst = src;
    }
}
