//! Hybrid model: dense feature extractor, quantum layer, dense classifier
//! head, with losses, Adam, and the training loop.

pub mod adam;
pub mod dense;
pub mod model;
pub mod train;

pub use adam::AdamState;
pub use dense::{Activation, DenseLayer};
pub use model::{HybridModel, ModelArch};
pub use train::{train, EpochRecord, LossKind, TrainConfig, TrainHistory};
