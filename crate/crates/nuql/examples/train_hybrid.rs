//! Train one hybrid model end to end: dense extractor, post-selected quantum
//! layer, dense head, Adam with early stopping on a nonlinear two-class
//! problem (concentric shells).
//!
//! ```bash
//! cargo run --release --example train_hybrid
//! ```

use nuql::circuits::{LayerVariant, QuantumLayerSpec};
use nuql::harness::dataset::synthetic_shells;
use nuql::hybrid::model::{HybridModel, ModelArch};
use nuql::hybrid::train::{evaluate, train, LossKind, TrainConfig};

fn main() -> nuql::Result<()> {
    let pool = synthetic_shells(8, 600, 7)?;
    let test = synthetic_shells(8, 200, 8)?;
    let (train_set, val_set) = pool.split(0.2, 1)?;

    let spec = QuantumLayerSpec::new(LayerVariant::Lcu, 3);
    let arch = ModelArch::with_quantum(8, vec![24, 12], spec, vec![64], 2);
    let model = HybridModel::init(arch, 42)?;
    println!(
        "hybrid model: 8 -> [24, 12] -> 3 angles -> wrapped quantum layer -> [64] -> 2 classes"
    );
    println!(
        "{} trainable parameters ({} quantum)",
        model.n_trainable(),
        model.quantum_params.len()
    );

    let config = TrainConfig {
        learning_rate: 0.003,
        max_epochs: 20,
        patience: 5,
        seed: 42,
        ..TrainConfig::default()
    };
    let (mut best, history) = train(model, &train_set, &val_set, &config)?;

    println!("\nepoch  train_loss  val_loss  val_acc%");
    for record in &history.epochs {
        println!(
            "{:>5}  {:>10}  {:>8.4}  {:>7.2}",
            record.epoch,
            record
                .train_loss
                .map_or("-".to_string(), |l| format!("{l:.4}")),
            record.val_loss,
            record.val_metric,
        );
    }
    println!(
        "best epoch {} of {}{}",
        history.best_epoch,
        history.epochs_trained(),
        if history.stopped_early { " (stopped early)" } else { "" }
    );

    let (test_loss, test_acc, stats) = evaluate(&mut best, &test, LossKind::CrossEntropy)?;
    println!("\ntest: loss {test_loss:.4}, accuracy {test_acc:.2}%");
    if let Some(p) = stats.mean_success() {
        println!("mean post-selection acceptance on the test set: {p:.3}");
    }
    Ok(())
}
