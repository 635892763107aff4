//! Fidelity-based reference for the quantum Fisher information.
//!
//! For pure states, |<psi(theta)|psi(theta + eps)>|^2 = 1 - eps^T F eps / 4
//! to second order, so F_ij = -2 d^2/d eps_i d eps_j of the fidelity at
//! eps = 0. Central second differences of the fidelity give an estimate that
//! never touches the analytic state-derivative machinery.

use crate::circuits::{layer_program, run_postselected, QuantumLayerSpec};
use crate::error::Result;
use crate::statevec::{Bindings, StateVector};

/// QFI estimate from second differences of fidelity, step `h` (1e-3 is a
/// good default: O(h^2) truncation against f64 roundoff).
pub fn qfi_fidelity_estimate(
    state_fn: &dyn Fn(&[f64]) -> Result<StateVector>,
    thetas: &[f64],
    h: f64,
) -> Result<Vec<Vec<f64>>> {
    let p = thetas.len();
    let base = state_fn(thetas)?;
    let fid = |shift: &[f64]| -> Result<f64> {
        let mut moved = thetas.to_vec();
        for (m, s) in moved.iter_mut().zip(shift) {
            *m += s;
        }
        Ok(base.fidelity(&state_fn(&moved)?))
    };

    let mut matrix = vec![vec![0.0; p]; p];
    for i in 0..p {
        let mut shift = vec![0.0; p];
        shift[i] = h;
        let f_plus = fid(&shift)?;
        shift[i] = -h;
        let f_minus = fid(&shift)?;
        // f(0) = 1 exactly
        matrix[i][i] = -2.0 * (f_plus - 2.0 + f_minus) / (h * h);
    }
    for i in 0..p {
        for j in (i + 1)..p {
            let mut shift = vec![0.0; p];
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                shift[i] = si;
                shift[j] = sj;
                fid(&shift)
            };
            let pp = corner(h, h)?;
            let pm = corner(h, -h)?;
            let mp = corner(-h, h)?;
            let mm = corner(-h, -h)?;
            let value = -2.0 * (pp - pm - mp + mm) / (4.0 * h * h);
            matrix[i][j] = value;
            matrix[j][i] = value;
        }
    }
    Ok(matrix)
}

/// The state function a layer spec induces: the circuit state for the
/// unitary baseline, the renormalized post-selected branch otherwise.
pub fn layer_state_fn<'a>(
    spec: &QuantumLayerSpec,
    inputs: &'a [f64],
) -> impl Fn(&[f64]) -> Result<StateVector> + 'a {
    let program = layer_program(spec);
    let wrapped = spec.variant.is_wrapped();
    move |thetas: &[f64]| {
        let values = Bindings::new(thetas, inputs);
        if wrapped {
            Ok(run_postselected(&program, &values)?.0)
        } else {
            program.run(&values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::LayerVariant;
    use crate::fisher::qfi_matrix;

    #[test]
    fn fidelity_oracle_recovers_single_ry() {
        let spec = QuantumLayerSpec::new(LayerVariant::NoLcu, 2).with_blocks(1);
        let thetas = vec![0.9, 1.7];
        let inputs = vec![0.0, 0.0];
        let estimate =
            qfi_fidelity_estimate(&layer_state_fn(&spec, &inputs), &thetas, 1e-3).unwrap();
        let exact = qfi_matrix(&spec, &thetas, &inputs).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let scale = exact.matrix[i][j].abs().max(1.0);
                assert!(
                    (estimate[i][j] - exact.matrix[i][j]).abs() / scale < 1e-4,
                    "entry ({i},{j}): {} vs {}",
                    estimate[i][j],
                    exact.matrix[i][j]
                );
            }
        }
    }

    #[test]
    fn fidelity_oracle_covers_postselected_state() {
        let spec = QuantumLayerSpec::new(LayerVariant::Lcu, 2).with_blocks(1);
        let thetas = vec![0.4, 2.2];
        let inputs = vec![0.6, -0.3];
        let estimate =
            qfi_fidelity_estimate(&layer_state_fn(&spec, &inputs), &thetas, 1e-3).unwrap();
        let exact = qfi_matrix(&spec, &thetas, &inputs).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let scale = exact.matrix[i][j].abs().max(1.0);
                assert!((estimate[i][j] - exact.matrix[i][j]).abs() / scale < 1e-4);
            }
        }
    }
}
