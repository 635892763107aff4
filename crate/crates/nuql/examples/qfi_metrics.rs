//! Quantum Fisher information diagnostics: the QFI matrix, its trace as the
//! effective dimension, a finite-difference-of-fidelity cross-check, and the
//! two parameter-efficiency metrics.
//!
//! ```bash
//! cargo run --release --example qfi_metrics
//! ```

use nuql::circuits::{LayerVariant, QuantumLayerSpec};
use nuql::fisher::{
    effective_dimension, fisher_efficiency, fisher_efficiency_perf, qfi_matrix,
};
use nuql::oracle::fidelity::{layer_state_fn, qfi_fidelity_estimate};

fn main() -> nuql::Result<()> {
    let spec = QuantumLayerSpec::new(LayerVariant::Lcu, 2).with_blocks(1);
    let thetas = vec![0.9, 2.1];
    let inputs = vec![0.4, -0.6];

    let qfi = qfi_matrix(&spec, &thetas, &inputs)?;
    println!("QFI of the post-selected state, N=2, one block:");
    for row in &qfi.matrix {
        println!("  {row:+.6?}");
    }
    println!("effective dimension (trace): {:.6}", effective_dimension(&qfi));
    println!("min eigenvalue: {:+.2e} (positive semidefinite)", qfi.min_eigenvalue());

    // cross-check against -2 d^2/d eps^2 |<psi(theta)|psi(theta+eps)>|^2
    let estimate = qfi_fidelity_estimate(&layer_state_fn(&spec, &inputs), &thetas, 1e-3)?;
    println!("\nfidelity-curvature estimate of the same matrix:");
    for row in &estimate {
        println!("  {row:+.6?}");
    }

    // parameter-count efficiency: positive means fewer parameters
    println!("\nparameter-count efficiency (N_classical, N_quantum) -> eta:");
    for (nc, nq) in [(100usize, 80usize), (100, 100), (100, 125)] {
        println!("  ({nc}, {nq}) -> {:+.1}%", fisher_efficiency(nc, nq)?);
    }

    // performance-ratio form over an (lcu, nolcu, classical) accuracy triple
    let eta = fisher_efficiency_perf(62.65, 61.91, 62.10)?;
    println!("\nperformance-ratio efficiency of (62.65, 61.91 | 62.10): {eta:+.3}%");
    Ok(())
}
