//! IQP circuit variants: a Hadamard sandwich around a diagonal core of RZ
//! rotations and controlled phases on a ring. The layer form encodes data by
//! angle embedding; the embedding form uses an IQP block for the data too
//! (2N-1 features). Both run inside the ancilla wrapper.
//!
//! ```bash
//! cargo run --release --example iqp_circuits
//! ```

use nuql::circuits::{
    build_iqp_block, forward_nonunitary, iqp_param_count, LayerVariant, QuantumLayerSpec,
};
use nuql::statevec::Bindings;

fn main() -> nuql::Result<()> {
    println!("IQP trainable parameters (ring closes only for N > 2):");
    for n in 1..=6 {
        println!("  N = {n}: {} parameters", iqp_param_count(n));
    }

    // single-qubit IQP block: H RZ(t) H acts like RX(t) on expectations
    let block = build_iqp_block(1, 0);
    let t = 0.83;
    let state = block.run(&Bindings::new(&[t], &[]))?;
    println!("\nH RZ({t}) H on |0>: <Z> = {:+.6} (cos {t} = {:+.6})", state.expectation_z(0)?, t.cos());

    // the two supervised variants at N = 4
    for variant in [LayerVariant::IqpLayer, LayerVariant::IqpEmbedding] {
        let spec = QuantumLayerSpec::new(variant, 4);
        let thetas: Vec<f64> = (0..spec.n_params()).map(|i| 0.3 + 0.2 * i as f64).collect();
        let inputs: Vec<f64> = (0..spec.n_inputs()).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        let (expectations, success) = forward_nonunitary(&spec, &thetas, &inputs)?;
        println!(
            "\n{:?}: {} inputs, {} parameters",
            variant,
            spec.n_inputs(),
            spec.n_params()
        );
        println!("  <Z_i> = {expectations:+.4?}");
        println!("  acceptance probability {success:.4}");
    }

    // the circuit JSON is the debugging interface
    let program = nuql::circuits::layer_program(&QuantumLayerSpec::new(LayerVariant::IqpLayer, 2));
    println!("\nIQP layer program on 2+1 qubits:\n{}", program.to_json()?);
    Ok(())
}
