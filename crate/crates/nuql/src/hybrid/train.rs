//! Losses, joint classical/quantum gradients, and the training loop.

use crate::error::{Error, Result};
use crate::grad::grad_reverse_weighted;
use crate::harness::dataset::{shuffle, Dataset, Labels};
use crate::hybrid::adam::AdamState;
use crate::hybrid::model::{ForwardStats, HybridModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    CrossEntropy,
    Mse,
}

/// Optimizer and loop settings. Defaults follow the usual Adam values:
/// lr 0.001, beta1 0.9, beta2 0.999, eps 1e-8, no weight decay, batch 32,
/// at most 30 epochs with patience 5 on the validation metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub loss: LossKind,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            max_epochs: 30,
            patience: 5,
            loss: LossKind::CrossEntropy,
            seed: 42,
        }
    }
}

/// Per-epoch record; epoch 0 is the pre-training validation baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: Option<f64>,
    pub val_loss: f64,
    /// Accuracy in percent for classification, MAE for regression.
    pub val_metric: f64,
    /// Stream seed the batch order was drawn from, for replay.
    pub shuffle_seed: u64,
    pub degenerate_samples: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainHistory {
    /// Number of completed training epochs (the epoch-0 baseline excluded).
    pub fn epochs_trained(&self) -> usize {
        self.epochs.len().saturating_sub(1)
    }
}

/// Softmax probabilities clamped at 1e-12 before the log.
fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

/// Cross-entropy of one sample plus dL/dlogits.
fn cross_entropy_sample(logits: &[f64], class: usize) -> (f64, Vec<f64>) {
    let probs = softmax(logits);
    let loss = -probs[class].max(1e-12).ln();
    let mut dlogits = probs;
    dlogits[class] -= 1.0;
    (loss, dlogits)
}

/// Mean squared error of one sample plus dL/doutputs.
fn mse_sample(outputs: &[f64], target: f64) -> (f64, Vec<f64>) {
    let n = outputs.len() as f64;
    let mut dlogits = Vec::with_capacity(outputs.len());
    let mut loss = 0.0;
    for &o in outputs {
        let diff = o - target;
        loss += diff * diff / n;
        dlogits.push(2.0 * diff / n);
    }
    (loss, dlogits)
}

fn target_of(labels: &Labels, i: usize, loss: LossKind) -> Result<LossTarget> {
    match (labels, loss) {
        (Labels::Classes { labels, n_classes }, LossKind::CrossEntropy) => {
            let class = labels[i];
            if class >= *n_classes {
                return Err(Error::Config(format!("class {class} out of range")));
            }
            Ok(LossTarget::Class(class))
        }
        (Labels::Values(v), LossKind::Mse) => Ok(LossTarget::Value(v[i])),
        _ => Err(Error::Config(
            "loss kind does not match label kind (cross_entropy needs classes, mse needs values)"
                .into(),
        )),
    }
}

#[derive(Clone, Copy)]
enum LossTarget {
    Class(usize),
    Value(f64),
}

/// Mean loss over a batch and the gradient with respect to every trainable
/// parameter (extractor, quantum angles, head jointly), in the model's flat
/// layout.
pub fn loss_and_grad(
    model: &mut HybridModel,
    dataset: &Dataset,
    indices: &[usize],
    loss: LossKind,
) -> Result<(f64, Vec<f64>, ForwardStats)> {
    let n_extractor: usize = model.extractor.iter().map(|l| l.n_trainable()).sum();
    let n_quantum = model.quantum_params.len();
    let n_head: usize = model.head.iter().map(|l| l.n_trainable()).sum();
    let mut grad = vec![0.0; n_extractor + n_quantum + n_head];
    let mut total_loss = 0.0;
    let mut stats = ForwardStats::default();
    let batch = indices.len() as f64;
    let thetas = model.quantum_params.clone();
    let spec = model.arch.quantum;
    let wrapped = spec.map_or(false, |s| s.variant.is_wrapped());

    for &i in indices {
        let x = &dataset.features[i];
        let target = target_of(&dataset.labels, i, loss)?;

        // forward with caches
        let mut extractor_io: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(model.extractor.len());
        let mut v = x.clone();
        for layer in &model.extractor {
            let (pre, post) = layer.forward_cached(&v)?;
            extractor_io.push((std::mem::replace(&mut v, post), pre));
        }
        let bottleneck = v;

        let (head_in, success_prob, degenerate) = model.quantum_forward(&bottleneck)?;
        stats.record(&crate::hybrid::model::SampleForward {
            output: Vec::new(),
            success_prob,
            degenerate,
        });

        let mut head_io: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(model.head.len());
        let mut v = head_in.clone();
        for layer in &model.head {
            let (pre, post) = layer.forward_cached(&v)?;
            head_io.push((std::mem::replace(&mut v, post), pre));
        }
        let output = v;

        if output.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite model output on sample {i}: {output:?}"
            )));
        }
        let (sample_loss, mut d_out) = match target {
            LossTarget::Class(c) => cross_entropy_sample(&output, c),
            LossTarget::Value(y) => mse_sample(&output, y),
        };
        if !sample_loss.is_finite() {
            return Err(Error::Numerical(format!(
                "loss is not finite on sample {i} (output {output:?})"
            )));
        }
        total_loss += sample_loss / batch;
        for d in &mut d_out {
            *d /= batch;
        }

        // head backward
        let mut cursor = grad.len();
        let mut d_vec = d_out;
        for (layer, (input, pre)) in model.head.iter().zip(&head_io).rev() {
            cursor -= layer.n_trainable();
            let (dw, db) = grad[cursor..cursor + layer.n_trainable()]
                .split_at_mut(layer.weights.len());
            d_vec = layer.backward(input, pre, &d_vec, dw, db);
        }
        let d_head_in = d_vec;

        // through the quantum layer: chain rule hands the layer d L / d <Z_i>
        let d_bottleneck = match (&spec, degenerate) {
            (None, _) => d_head_in,
            (Some(_), true) => vec![0.0; bottleneck.len()],
            (Some(s), false) => {
                let program = model.program().expect("quantum arch compiles").clone();
                let w = grad_reverse_weighted(
                    &program,
                    s.n_qubits,
                    wrapped,
                    &thetas,
                    &bottleneck,
                    &d_head_in,
                )?;
                for (g, d) in grad[n_extractor..n_extractor + n_quantum]
                    .iter_mut()
                    .zip(&w.d_thetas)
                {
                    *g += d;
                }
                w.d_inputs
            }
        };

        // extractor backward
        let mut cursor = n_extractor;
        let mut d_vec = d_bottleneck;
        for (layer, (input, pre)) in model.extractor.iter().zip(&extractor_io).rev() {
            cursor -= layer.n_trainable();
            let (dw, db) = grad[cursor..cursor + layer.n_trainable()]
                .split_at_mut(layer.weights.len());
            d_vec = layer.backward(input, pre, &d_vec, dw, db);
        }
    }
    Ok((total_loss, grad, stats))
}

fn score_outputs(outputs: &[Vec<f64>], dataset: &Dataset, loss: LossKind) -> Result<(f64, f64)> {
    let mut total_loss = 0.0;
    let mut metric_acc = 0.0;
    for (i, output) in outputs.iter().enumerate() {
        if output.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite model output on sample {i}: {output:?}"
            )));
        }
        match target_of(&dataset.labels, i, loss)? {
            LossTarget::Class(c) => {
                let (l, _) = cross_entropy_sample(output, c);
                total_loss += l;
                let predicted = output
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j)
                    .unwrap_or(0);
                if predicted == c {
                    metric_acc += 1.0;
                }
            }
            LossTarget::Value(y) => {
                let (l, _) = mse_sample(output, y);
                total_loss += l;
                metric_acc += (output[0] - y).abs();
            }
        }
    }
    let n = outputs.len() as f64;
    let metric = match loss {
        LossKind::CrossEntropy => metric_acc / n * 100.0,
        LossKind::Mse => metric_acc / n,
    };
    if !(total_loss / n).is_finite() {
        return Err(Error::Numerical("evaluation loss is not finite".into()));
    }
    Ok((total_loss / n, metric))
}

/// Mean loss and metric (accuracy % or MAE) over a dataset.
pub fn evaluate(
    model: &mut HybridModel,
    dataset: &Dataset,
    loss: LossKind,
) -> Result<(f64, f64, ForwardStats)> {
    if dataset.is_empty() {
        return Err(Error::Config("cannot evaluate on an empty dataset".into()));
    }
    let (outputs, stats) = model.forward_batch(&dataset.features)?;
    let (mean_loss, metric) = score_outputs(&outputs, dataset, loss)?;
    Ok((mean_loss, metric, stats))
}

/// Like [`evaluate`] but with the quantum layer measured on a finite shot
/// budget per sample, modeling measurement noise. Training never uses this
/// path; it exists to study the exact pass's robustness.
pub fn evaluate_sampled(
    model: &mut HybridModel,
    dataset: &Dataset,
    loss: LossKind,
    shots: u64,
    seed: u64,
) -> Result<(f64, f64, ForwardStats)> {
    if dataset.is_empty() {
        return Err(Error::Config("cannot evaluate on an empty dataset".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outputs = Vec::with_capacity(dataset.len());
    let mut stats = ForwardStats::default();
    for x in &dataset.features {
        let bottleneck = model.extractor_forward(x)?;
        let (head_in, success_prob, degenerate) =
            model.quantum_forward_sampled(&bottleneck, shots, &mut rng)?;
        let mut v = head_in;
        for layer in &model.head {
            v = layer.forward(&v)?;
        }
        stats.record(&crate::hybrid::model::SampleForward {
            output: Vec::new(),
            success_prob,
            degenerate,
        });
        outputs.push(v);
    }
    let (mean_loss, metric) = score_outputs(&outputs, dataset, loss)?;
    Ok((mean_loss, metric, stats))
}

/// Higher-is-better score used for early stopping: accuracy for
/// classification, negated loss for regression.
fn stopping_score(loss_kind: LossKind, val_loss: f64, val_metric: f64) -> f64 {
    match loss_kind {
        LossKind::CrossEntropy => val_metric,
        LossKind::Mse => -val_loss,
    }
}

/// Train with Adam and early stopping; returns the best-validation model.
///
/// Epoch 0 evaluates the freshly initialized model so a run that never
/// improves still returns its best (initial) checkpoint. Training stops once
/// the validation score has not improved for more than `patience` epochs, or
/// at `max_epochs`.
pub fn train(
    model: HybridModel,
    train_set: &Dataset,
    val_set: &Dataset,
    config: &TrainConfig,
) -> Result<(HybridModel, TrainHistory)> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Config("train and validation sets must be non-empty".into()));
    }
    train_set.validate()?;
    val_set.validate()?;
    let mut model = model;
    let mut params = model.params_flat();
    let mut adam = AdamState::new(params.len());
    let mut history = TrainHistory::default();

    let (val_loss, val_metric, val_stats) = evaluate(&mut model, val_set, config.loss)?;
    history.epochs.push(EpochRecord {
        epoch: 0,
        train_loss: None,
        val_loss,
        val_metric,
        shuffle_seed: 0,
        degenerate_samples: val_stats.degenerate_count,
    });
    let mut best_score = stopping_score(config.loss, val_loss, val_metric);
    let mut best_model = model.clone();
    let mut best_epoch = 0usize;

    let mut indices: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=config.max_epochs {
        let shuffle_seed = config
            .seed
            .wrapping_add((epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
        shuffle(&mut indices, &mut rng);

        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        let mut degenerate = 0usize;
        for batch in indices.chunks(config.batch_size.max(1)) {
            let (loss, grad, stats) = loss_and_grad(&mut model, train_set, batch, config.loss)?;
            degenerate += stats.degenerate_count;
            if stats.degenerate_count > 0 {
                eprintln!(
                    "warning: {} degenerate post-selection sample(s) in epoch {epoch}, \
                     substituted zero expectations",
                    stats.degenerate_count
                );
            }
            adam.step(&mut params, &grad, config)?;
            model.set_params_flat(&params)?;
            epoch_loss += loss;
            batches += 1;
        }

        let (val_loss, val_metric, val_stats) = evaluate(&mut model, val_set, config.loss)?;
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: Some(epoch_loss / batches.max(1) as f64),
            val_loss,
            val_metric,
            shuffle_seed,
            degenerate_samples: degenerate + val_stats.degenerate_count,
        });

        let score = stopping_score(config.loss, val_loss, val_metric);
        if score > best_score {
            best_score = score;
            best_model = model.clone();
            best_epoch = epoch;
        } else if epoch - best_epoch > config.patience {
            history.stopped_early = true;
            break;
        }
    }
    history.best_epoch = best_epoch;
    Ok((best_model, history))
}
