//! The single-ancilla non-unitary layer: wrap a variational circuit W with
//! Hadamard / controlled-W / Hadamard on one ancilla and post-select the
//! ancilla on 0. The surviving main-register state is
//! (I + W)|psi> / ||(I + W)|psi>|| and the acceptance probability is
//! ||(I + W)|psi>||^2 / 4.
//!
//! ```bash
//! cargo run --release --example lcu_postselection
//! ```

use nuql::circuits::{forward_nonunitary, forward_unitary, LayerVariant, QuantumLayerSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> nuql::Result<()> {
    let n = 3;
    let wrapped = QuantumLayerSpec::new(LayerVariant::Lcu, n);
    let unitary = QuantumLayerSpec::new(LayerVariant::NoLcu, n);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let thetas: Vec<f64> =
        (0..wrapped.n_params()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let inputs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let direct = forward_unitary(&unitary, &thetas, &inputs)?;
    let (postselected, success) = forward_nonunitary(&wrapped, &thetas, &inputs)?;

    println!("N = {n}, 4 blocks, {} trainable parameters", wrapped.n_params());
    println!("unitary <Z_i>:       {direct:+.4?}");
    println!("post-selected <Z_i>: {postselected:+.4?}");
    println!("acceptance probability: {success:.4} (about 1/2 for random W)");

    // the same circuit with an empty W behaves as the identity: the two
    // passes coincide and every shot is accepted
    let identity = QuantumLayerSpec::new(LayerVariant::Lcu, n).with_blocks(0);
    let (expectations, success) = forward_nonunitary(&identity, &[], &inputs)?;
    println!("\nW = I: success probability {success:.1}, <Z_i> = {expectations:+.4?}");

    // mean acceptance over random parameter draws
    let draws = 200;
    let mut total = 0.0;
    for _ in 0..draws {
        let thetas: Vec<f64> =
            (0..wrapped.n_params()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        total += forward_nonunitary(&wrapped, &thetas, &inputs)?.1;
    }
    println!("\nmean acceptance over {draws} random draws: {:.3}", total / draws as f64);
    Ok(())
}
