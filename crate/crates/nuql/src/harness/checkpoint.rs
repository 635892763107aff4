//! Versioned model checkpoints (JSON container).

use crate::error::{Error, Result};
use crate::hybrid::model::HybridModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CHECKPOINT_VERSION: u32 = 1;

/// Best-validation model plus enough provenance to re-evaluate it: the run
/// seed, the epoch the weights come from, and the quantum angles the run
/// started from (for information diagnostics at initialization).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub cell: String,
    pub seed: u64,
    pub epoch: usize,
    pub quantum_params_init: Vec<f64>,
    pub model: HybridModel,
}

impl Checkpoint {
    pub fn new(
        cell: String,
        seed: u64,
        epoch: usize,
        quantum_params_init: Vec<f64>,
        model: HybridModel,
    ) -> Self {
        Checkpoint { version: CHECKPOINT_VERSION, cell, seed, epoch, quantum_params_init, model }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(self)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let checkpoint: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if checkpoint.version != CHECKPOINT_VERSION {
            return Err(Error::Format {
                format: "checkpoint",
                reason: format!(
                    "version {} not supported (expected {CHECKPOINT_VERSION})",
                    checkpoint.version
                ),
            });
        }
        Ok(checkpoint)
    }
}
