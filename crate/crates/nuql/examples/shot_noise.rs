//! Measurement shot noise on the post-selected layer: sampled expectation
//! estimates converge to the exact values at the usual 1/sqrt(shots) rate,
//! and the acceptance probability is estimated by the accepted fraction.
//!
//! ```bash
//! cargo run --release --example shot_noise
//! ```

use nuql::circuits::{
    forward_nonunitary, forward_nonunitary_sampled, LayerVariant, QuantumLayerSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nuql::Result<()> {
    let spec = QuantumLayerSpec::new(LayerVariant::Lcu, 3);
    let thetas: Vec<f64> = (0..spec.n_params()).map(|i| 0.5 + 0.37 * i as f64).collect();
    let inputs = [0.8, -0.3, 0.5];

    let (exact, exact_success) = forward_nonunitary(&spec, &thetas, &inputs)?;
    println!("exact <Z_i> = {exact:+.5?}, acceptance {exact_success:.5}\n");

    println!("{:>9}  {:>10}  {:>10}  {:>12}", "shots", "max |err|", "rms err", "acceptance");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for shots in [100u64, 1_000, 10_000, 100_000, 1_000_000] {
        // average the error over a few repetitions to make the trend visible
        let reps = 8;
        let mut max_err = 0.0f64;
        let mut sq_err = 0.0;
        let mut acc_sum = 0.0;
        for _ in 0..reps {
            let (sampled, success) =
                forward_nonunitary_sampled(&spec, &thetas, &inputs, shots, &mut rng)?;
            for (s, e) in sampled.iter().zip(&exact) {
                max_err = max_err.max((s - e).abs());
                sq_err += (s - e) * (s - e);
            }
            acc_sum += success;
        }
        let rms = (sq_err / (reps * exact.len()) as f64).sqrt();
        println!(
            "{shots:>9}  {max_err:>10.5}  {rms:>10.5}  {:>12.5}",
            acc_sum / reps as f64
        );
    }
    println!("\nrms error shrinks about 3.2x per 10x shots (the 1/sqrt law)");
    Ok(())
}
