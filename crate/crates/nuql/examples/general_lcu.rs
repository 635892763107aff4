//! The general K-term linear combination of unitaries: prepare an ancilla
//! register with amplitudes sqrt(alpha_k / sum alpha), apply U_k controlled
//! on |k>, uncompute the preparation, and post-select |0...0>.
//!
//! ```bash
//! cargo run --release --example general_lcu
//! ```

use nuql::lcu::{lcu_apply_general, LcuDecomposition};
use nuql::linalg::CMatrix;
use nuql::statevec::StateVector;
use num_complex::Complex64;

fn pauli_x() -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    CMatrix::from_rows(&[&[o, l], &[l, o]])
}

fn pauli_z() -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    CMatrix::from_rows(&[&[l, o], &[o, -l]])
}

fn main() -> nuql::Result<()> {
    let input = StateVector::new_zero_state(1)?;

    // (I + X)/2 projects |0> onto |+>
    let decomp = LcuDecomposition::new(vec![1.0, 1.0], vec![CMatrix::identity(2), pauli_x()]);
    let (out, success) = lcu_apply_general(&decomp, &input)?;
    println!("(I + X)|0>  -> {:?}  success {success:.3}", out.amplitudes());

    // a three-term combination: 0.7 I + 0.2 X + 0.1 Z applied to |0>
    let decomp = LcuDecomposition::new(
        vec![0.7, 0.2, 0.1],
        vec![CMatrix::identity(2), pauli_x(), pauli_z()],
    );
    let (out, success) = lcu_apply_general(&decomp, &input)?;
    println!("0.7 I + 0.2 X + 0.1 Z on |0> -> {:?}", out.amplitudes());
    println!("success probability {success:.4} = ||O psi||^2 / (sum alpha)^2");

    // an annihilating combination has nothing to post-select
    let decomp = LcuDecomposition::new(
        vec![1.0, 1.0],
        vec![
            CMatrix::identity(2),
            CMatrix::identity(2).scale(Complex64::new(-1.0, 0.0)),
        ],
    );
    match lcu_apply_general(&decomp, &input) {
        Err(e) => println!("(I - I)|0>  -> {e}"),
        Ok(_) => unreachable!(),
    }

    // validation rejects non-unitary operands up front
    let decomp = LcuDecomposition::new(
        vec![1.0],
        vec![CMatrix::identity(2).scale(Complex64::new(2.0, 0.0))],
    );
    match lcu_apply_general(&decomp, &input) {
        Err(e) => println!("2I as an operand -> {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
