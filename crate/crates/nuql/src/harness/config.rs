//! Experiment configuration: one JSON document drives a whole sweep.

use crate::circuits::LayerVariant;
use crate::error::{Error, Result};
use crate::harness::dataset::DatasetSource;
use crate::hybrid::train::TrainConfig;
use crate::statevec::MAX_QUBITS;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A sweep axis entry: the classical baseline or one quantum layer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantChoice {
    Classical,
    Nolcu,
    Lcu,
    IqpLayer,
    IqpEmbedding,
}

impl VariantChoice {
    pub fn layer_variant(self) -> Option<LayerVariant> {
        match self {
            VariantChoice::Classical => None,
            VariantChoice::Nolcu => Some(LayerVariant::NoLcu),
            VariantChoice::Lcu => Some(LayerVariant::Lcu),
            VariantChoice::IqpLayer => Some(LayerVariant::IqpLayer),
            VariantChoice::IqpEmbedding => Some(LayerVariant::IqpEmbedding),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VariantChoice::Classical => "classical",
            VariantChoice::Nolcu => "nolcu",
            VariantChoice::Lcu => "lcu",
            VariantChoice::IqpLayer => "iqp_layer",
            VariantChoice::IqpEmbedding => "iqp_embedding",
        }
    }
}

/// Full sweep description. Every field has a default except the dataset, so
/// a minimal config is just `{"dataset": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    #[serde(default = "default_variants")]
    pub variants: Vec<VariantChoice>,
    #[serde(default = "default_qubits")]
    pub qubit_scales: Vec<usize>,
    /// Independent training runs (distinct seeds) per cell.
    #[serde(default = "default_runs")]
    pub runs_per_config: usize,
    #[serde(default = "default_blocks")]
    pub n_blocks: usize,
    /// Hidden widths of the dense extractor before the bottleneck.
    #[serde(default = "default_extractor")]
    pub extractor_hidden: Vec<usize>,
    /// Hidden widths of the classifier head.
    #[serde(default = "default_head")]
    pub head_hidden: Vec<usize>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Seed of the train/validation split (distinct from run seeds).
    #[serde(default = "default_split_seed")]
    pub split_seed: u64,
    /// When set, the final test evaluation draws this many measurement shots
    /// per sample instead of using exact probabilities. Training is always
    /// exact; leave unset for noise-free runs.
    #[serde(default)]
    pub shots: Option<u64>,
}

fn default_variants() -> Vec<VariantChoice> {
    vec![VariantChoice::Classical, VariantChoice::Nolcu, VariantChoice::Lcu]
}
fn default_qubits() -> Vec<usize> {
    vec![4]
}
fn default_runs() -> usize {
    10
}
fn default_blocks() -> usize {
    4
}
fn default_extractor() -> Vec<usize> {
    vec![16]
}
fn default_head() -> Vec<usize> {
    vec![128]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_workers() -> usize {
    1
}
fn default_split_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::Config("no variants listed".into()));
        }
        if self.qubit_scales.is_empty() {
            return Err(Error::Config("no qubit scales listed".into()));
        }
        if self.runs_per_config < 2 {
            return Err(Error::Config(
                "runs_per_config must be >= 2 (sample variance needs n - 1 >= 1)".into(),
            ));
        }
        for &n in &self.qubit_scales {
            // wrapped variants carry one ancilla on top of N main qubits
            if n == 0 || n + 1 > MAX_QUBITS {
                return Err(Error::Config(format!(
                    "qubit scale {n} outside simulator capacity (1..={})",
                    MAX_QUBITS - 1
                )));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// All (variant, qubits, run) cells in a stable order.
    pub fn cells(&self) -> Vec<CellId> {
        let mut cells = Vec::new();
        for &variant in &self.variants {
            for &qubits in &self.qubit_scales {
                for run in 0..self.runs_per_config {
                    cells.push(CellId { variant, qubits, run });
                }
            }
        }
        cells
    }
}

/// One sweep cell: a (variant, qubit count, run index) triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellId {
    pub variant: VariantChoice,
    pub qubits: usize,
    pub run: usize,
}

impl CellId {
    /// Stable identifier used for record and checkpoint file names.
    pub fn key(&self) -> String {
        format!("{}_q{}_r{}", self.variant.name(), self.qubits, self.run)
    }

    /// Per-run seed: the shared base seed plus the run index, so matched
    /// variants train from paired initializations.
    pub fn seed(&self, base: u64) -> u64 {
        base.wrapping_add(self.run as u64)
    }
}
