//! Sweep execution: one training run per (variant, qubit scale, seed) cell,
//! persisted incrementally and resumable.
//!
//! Every cell is self-contained and seeded, so records do not depend on
//! worker scheduling. A cell whose record file already exists is skipped and
//! its record loaded, which makes a rerun on a completed output directory a
//! no-op and an interrupted sweep resumable by id.

use crate::error::{Error, Result};
use crate::harness::checkpoint::Checkpoint;
use crate::harness::config::{CellId, ExperimentConfig, VariantChoice};
use crate::harness::dataset::{load_dataset, Dataset, Labels};
use crate::hybrid::model::{HybridModel, ModelArch};
use crate::hybrid::train::{evaluate, train, LossKind, TrainConfig};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    AccuracyPercent,
    Mae,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Error { message: String },
}

/// Outcome of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub variant: VariantChoice,
    pub qubits: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub metric_kind: MetricKind,
    /// Final test metric; absent when the run failed.
    pub metric: Option<f64>,
    pub epochs_trained: usize,
    /// Wall-clock seconds; the only field exempt from byte-level
    /// reproducibility.
    pub wall_time_s: f64,
    /// Mean ancilla acceptance probability over the test evaluation,
    /// absent for the classical baseline.
    pub mean_success_prob: Option<f64>,
    pub degenerate_samples: usize,
    pub n_trainable: usize,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        matches!(self.status, RunStatus::Ok)
    }
}

pub fn records_dir(output_dir: &Path) -> PathBuf {
    output_dir.join("records")
}

pub fn checkpoints_dir(output_dir: &Path) -> PathBuf {
    output_dir.join("checkpoints")
}

/// Load every record file in an output directory, sorted by id.
pub fn load_records(output_dir: &Path) -> Result<Vec<RunRecord>> {
    let dir = records_dir(output_dir);
    let mut records = Vec::new();
    if !dir.exists() {
        return Ok(records);
    }
    for entry in std::fs::read_dir(&dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let record: RunRecord = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
            records.push(record);
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}

/// Run (or resume) the configured sweep. Completed cells are skipped by id;
/// failed runs are recorded with an error status and the sweep continues.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let data = load_dataset(&config.dataset, config.split_seed)?;
    validate_loss_kind(&data.0.labels, config.train.loss)?;

    let rec_dir = records_dir(&config.output_dir);
    let ckpt_dir = checkpoints_dir(&config.output_dir);
    std::fs::create_dir_all(&rec_dir)?;
    std::fs::create_dir_all(&ckpt_dir)?;

    let mut pending = VecDeque::new();
    for cell in config.cells() {
        if !rec_dir.join(format!("{}.json", cell.key())).exists() {
            pending.push_back(cell);
        }
    }

    let queue = Mutex::new(pending);
    let io_lock = Mutex::new(());
    let failures: Mutex<Vec<Error>> = Mutex::new(Vec::new());

    std::thread::scope(|scope| {
        for _ in 0..config.workers.min(config.cells().len().max(1)) {
            scope.spawn(|| loop {
                let cell = match queue.lock().expect("queue lock").pop_front() {
                    Some(cell) => cell,
                    None => break,
                };
                let record = run_cell(&cell, config, &data, &ckpt_dir);
                let text = match serde_json::to_string_pretty(&record) {
                    Ok(text) => text,
                    Err(e) => {
                        failures.lock().expect("failure lock").push(e.into());
                        continue;
                    }
                };
                // records are appended through one serialized writer
                let _io = io_lock.lock().expect("io lock");
                let path = rec_dir.join(format!("{}.json", cell.key()));
                let tmp = path.with_extension("tmp");
                if let Err(e) = std::fs::write(&tmp, &text).and_then(|_| std::fs::rename(&tmp, &path))
                {
                    failures.lock().expect("failure lock").push(e.into());
                }
            });
        }
    });

    if let Some(e) = failures.into_inner().expect("failure lock").into_iter().next() {
        return Err(e);
    }
    load_records(&config.output_dir)
}

fn validate_loss_kind(labels: &Labels, loss: LossKind) -> Result<()> {
    let ok = match loss {
        LossKind::CrossEntropy => labels.is_classification(),
        LossKind::Mse => !labels.is_classification(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(
            "train.loss does not match the dataset (cross_entropy needs class labels, \
             mse needs regression targets)"
                .into(),
        ))
    }
}

/// Architecture for one cell. The classical baseline keeps the extractor and
/// head of the quantum models at the same qubit scale and wires the
/// N-dimensional bottleneck straight into the head.
pub fn cell_arch(
    variant: VariantChoice,
    qubits: usize,
    config: &ExperimentConfig,
    input_dim: usize,
    n_outputs: usize,
) -> ModelArch {
    match variant.layer_variant() {
        Some(layer) => ModelArch::with_quantum(
            input_dim,
            config.extractor_hidden.clone(),
            crate::circuits::QuantumLayerSpec::new(layer, qubits).with_blocks(config.n_blocks),
            config.head_hidden.clone(),
            n_outputs,
        ),
        None => ModelArch::classical(
            input_dim,
            config.extractor_hidden.clone(),
            qubits,
            config.head_hidden.clone(),
            n_outputs,
        ),
    }
}

fn run_cell(
    cell: &CellId,
    config: &ExperimentConfig,
    data: &(Dataset, Dataset, Dataset),
    ckpt_dir: &Path,
) -> RunRecord {
    let start = std::time::Instant::now();
    let seed = cell.seed(config.train.seed);
    let metric_kind = match config.train.loss {
        LossKind::CrossEntropy => MetricKind::AccuracyPercent,
        LossKind::Mse => MetricKind::Mae,
    };
    let mut record = RunRecord {
        id: cell.key(),
        variant: cell.variant,
        qubits: cell.qubits,
        seed,
        status: RunStatus::Ok,
        metric_kind,
        metric: None,
        epochs_trained: 0,
        wall_time_s: 0.0,
        mean_success_prob: None,
        degenerate_samples: 0,
        n_trainable: 0,
    };
    match execute_cell(cell, config, data, ckpt_dir, seed) {
        Ok(outcome) => {
            record.metric = Some(outcome.metric);
            record.epochs_trained = outcome.epochs_trained;
            record.mean_success_prob = outcome.mean_success_prob;
            record.degenerate_samples = outcome.degenerate_samples;
            record.n_trainable = outcome.n_trainable;
        }
        Err(e) => {
            record.status = RunStatus::Error { message: e.to_string() };
        }
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    record
}

struct CellOutcome {
    metric: f64,
    epochs_trained: usize,
    mean_success_prob: Option<f64>,
    degenerate_samples: usize,
    n_trainable: usize,
}

fn execute_cell(
    cell: &CellId,
    config: &ExperimentConfig,
    (train_set, val_set, test_set): &(Dataset, Dataset, Dataset),
    ckpt_dir: &Path,
    seed: u64,
) -> Result<CellOutcome> {
    let n_outputs = match &train_set.labels {
        Labels::Classes { n_classes, .. } => *n_classes,
        Labels::Values(_) => 1,
    };
    let arch = cell_arch(cell.variant, cell.qubits, config, train_set.dim(), n_outputs);
    let model = HybridModel::init(arch, seed)?;
    let quantum_params_init = model.quantum_params.clone();
    let run_config = TrainConfig { seed, ..config.train.clone() };

    let (mut best, history) = train(model, train_set, val_set, &run_config)?;
    let (_, metric, stats) = match config.shots {
        Some(shots) => crate::hybrid::train::evaluate_sampled(
            &mut best,
            test_set,
            run_config.loss,
            shots,
            seed,
        )?,
        None => evaluate(&mut best, test_set, run_config.loss)?,
    };
    if !metric.is_finite() {
        return Err(Error::Numerical(format!("test metric is not finite in {}", cell.key())));
    }

    let degenerate_train: usize = history.epochs.iter().map(|e| e.degenerate_samples).sum();
    let checkpoint = Checkpoint::new(
        cell.key(),
        seed,
        history.best_epoch,
        quantum_params_init,
        best,
    );
    checkpoint.save(&ckpt_dir.join(format!("{}.json", cell.key())))?;

    Ok(CellOutcome {
        metric,
        epochs_trained: history.epochs_trained(),
        mean_success_prob: stats.mean_success(),
        degenerate_samples: degenerate_train + stats.degenerate_count,
        n_trainable: checkpoint.model.n_trainable(),
    })
}
