//! Dense statevector basics: gates, probabilities, expectations, and
//! post-selection.
//!
//! ```bash
//! cargo run --release --example statevector_basics
//! ```

use nuql::statevec::{Bindings, Gate, ParamRef, StateVector};

fn main() -> nuql::Result<()> {
    // |00>, then a Bell pair via H and CNOT (qubit 0 is the most
    // significant bit of the amplitude index)
    let mut state = StateVector::new_zero_state(2)?;
    let no_params = Bindings::new(&[], &[]);
    state.apply_gate(&Gate::h(0), &no_params)?;
    state.apply_gate(&Gate::cnot(0, 1), &no_params)?;
    println!("Bell state amplitudes: {:?}", state.amplitudes());
    println!("probabilities:         {:?}", state.probabilities());
    println!("<Z_0> = {:+.3}, <Z_1> = {:+.3}", state.expectation_z(0)?, state.expectation_z(1)?);

    // parametric rotation: RY(pi/3)|0> gives <Z> = cos(pi/3) = 0.5
    let mut qubit = StateVector::new_zero_state(1)?;
    let thetas = [std::f64::consts::PI / 3.0];
    qubit.apply_gate(&Gate::ry(0, ParamRef::Theta(0)), &Bindings::new(&thetas, &[]))?;
    println!("\nRY(pi/3)|0>: <Z> = {:+.6}", qubit.expectation_z(0)?);

    // post-selecting the Bell pair on qubit 0 = 0 collapses qubit 1
    let (collapsed, mass) = state.postselect(0, 0)?;
    println!("\npost-select qubit 0 = 0: success probability {mass:.3}");
    println!("collapsed amplitudes: {:?}", collapsed.amplitudes());

    // post-selecting on an empty branch is an error, not a NaN
    let zero = StateVector::new_zero_state(1)?;
    match zero.postselect(0, 1) {
        Err(e) => println!("\npost-selecting |0> on outcome 1: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
