//! Three gradient routes through a quantum layer: adjoint reverse mode (the
//! training default, exact through the post-selection renormalization), the
//! two-point parameter-shift rule (unitary circuits only), and central
//! finite differences (the oracle).
//!
//! ```bash
//! cargo run --release --example gradients
//! ```

use nuql::circuits::{LayerVariant, QuantumLayerSpec};
use nuql::grad::{grad_finite_difference, grad_reverse, grad_unitary_parameter_shift};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> nuql::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    // unitary baseline: all three routes agree
    let spec = QuantumLayerSpec::new(LayerVariant::NoLcu, 3);
    let thetas: Vec<f64> =
        (0..spec.n_params()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let inputs: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let reverse = grad_reverse(&spec, &thetas, &inputs)?;
    let fd = grad_finite_difference(&spec, &thetas, &inputs, 1e-5)?;
    let shift = grad_unitary_parameter_shift(&spec, &thetas, &inputs, 0)?;
    println!("unitary N=3, d<Z_i>/d theta_0:");
    println!("  reverse mode:    {:+.8?}", column(&reverse.d_expectations_d_params, 0));
    println!("  parameter shift: {shift:+.8?}");
    println!("  finite diff:     {:+.8?}", column(&fd.d_expectations_d_params, 0));

    // wrapped layer: the expectation is a quotient u(theta)/p(theta); the
    // shift rule no longer applies, reverse mode handles it exactly
    let spec = QuantumLayerSpec::new(LayerVariant::Lcu, 3);
    let reverse = grad_reverse(&spec, &thetas, &inputs)?;
    let fd = grad_finite_difference(&spec, &thetas, &inputs, 1e-5)?;
    println!("\nwrapped N=3, d<Z_0>/d theta_k, success probability {:.4}:", reverse.success_prob);
    println!("  reverse mode: {:+.8?}", &reverse.d_expectations_d_params[0][..4]);
    println!("  finite diff:  {:+.8?}", &fd.d_expectations_d_params[0][..4]);
    println!(
        "  d success / d theta (reverse vs fd): {:+.8} vs {:+.8}",
        reverse.d_success_d_params[0], fd.d_success_d_params[0]
    );
    match grad_unitary_parameter_shift(&spec, &thetas, &inputs, 0) {
        Err(e) => println!("  parameter shift on the wrapped layer: {e}"),
        Ok(_) => unreachable!(),
    }

    // input-feature gradients flow back into the classical extractor
    println!("\nd<Z_0>/d x_m (reverse): {:+.8?}", reverse.d_expectations_d_inputs[0]);
    Ok(())
}

fn column(matrix: &[Vec<f64>], k: usize) -> Vec<f64> {
    matrix.iter().map(|row| row[k]).collect()
}
