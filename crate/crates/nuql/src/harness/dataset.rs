//! Dataset generation, loading, and deterministic splits.
//!
//! Features are kept in [0, 1]. Classification splits are stratified so that
//! every class keeps its proportion in both halves.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Targets: class indices for classification, real values for regression.
#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    Classes { labels: Vec<usize>, n_classes: usize },
    Values(Vec<f64>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Classes { labels, .. } => labels.len(),
            Labels::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Labels::Classes { .. })
    }

    pub fn n_classes(&self) -> Option<usize> {
        match self {
            Labels::Classes { n_classes, .. } => Some(*n_classes),
            Labels::Values(_) => None,
        }
    }
}

/// Feature matrix plus targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Labels,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, |f| f.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.labels.len() {
            return Err(Error::Format {
                format: "dataset",
                reason: format!(
                    "{} feature rows vs {} labels",
                    self.features.len(),
                    self.labels.len()
                ),
            });
        }
        let dim = self.dim();
        if self.features.iter().any(|f| f.len() != dim) {
            return Err(Error::Format {
                format: "dataset",
                reason: "ragged feature rows".into(),
            });
        }
        Ok(())
    }

    fn select(&self, idx: &[usize]) -> Dataset {
        let features = idx.iter().map(|&i| self.features[i].clone()).collect();
        let labels = match &self.labels {
            Labels::Classes { labels, n_classes } => Labels::Classes {
                labels: idx.iter().map(|&i| labels[i]).collect(),
                n_classes: *n_classes,
            },
            Labels::Values(v) => Labels::Values(idx.iter().map(|&i| v[i]).collect()),
        };
        Dataset { features, labels }
    }

    /// Deterministic split into (1 - holdout_fraction, holdout_fraction),
    /// stratified per class for classification.
    pub fn split(&self, holdout_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if self.is_empty() {
            return Err(Error::Config("cannot split an empty dataset".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut head_idx = Vec::new();
        let mut hold_idx = Vec::new();
        match &self.labels {
            Labels::Classes { labels, n_classes } => {
                for class in 0..*n_classes {
                    let mut members: Vec<usize> =
                        (0..labels.len()).filter(|&i| labels[i] == class).collect();
                    shuffle(&mut members, &mut rng);
                    let n_hold = (members.len() as f64 * holdout_fraction).round() as usize;
                    hold_idx.extend_from_slice(&members[..n_hold]);
                    head_idx.extend_from_slice(&members[n_hold..]);
                }
            }
            Labels::Values(v) => {
                let mut order: Vec<usize> = (0..v.len()).collect();
                shuffle(&mut order, &mut rng);
                let n_hold = (order.len() as f64 * holdout_fraction).round() as usize;
                hold_idx.extend_from_slice(&order[..n_hold]);
                head_idx.extend_from_slice(&order[n_hold..]);
            }
        }
        head_idx.sort_unstable();
        hold_idx.sort_unstable();
        Ok((self.select(&head_idx), self.select(&hold_idx)))
    }
}

/// Fisher-Yates with an explicit stream so splits and batch orders are
/// reproducible.
pub fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Where the data comes from. Synthetic sources generate deterministically
/// from their seed; file sources read IDX or CSV from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    /// Gaussian class blobs, linearly separable at default spread.
    SyntheticBlobs {
        classes: usize,
        dim: usize,
        n_train: usize,
        n_test: usize,
        seed: u64,
    },
    /// Two classes on concentric shells: radius decides the class, so no
    /// linear boundary works.
    SyntheticShells {
        dim: usize,
        n_train: usize,
        n_test: usize,
        seed: u64,
    },
    /// Scalar regression target y = mean of sin(2 pi x_i) rescaled into the unit interval.
    SyntheticRegression {
        dim: usize,
        n_train: usize,
        n_test: usize,
        seed: u64,
    },
    /// IDX image/label pairs in the standard big-endian layout.
    MnistSubset {
        train_images: PathBuf,
        train_labels: PathBuf,
        test_images: PathBuf,
        test_labels: PathBuf,
        n_train: usize,
        n_test: usize,
    },
    /// Numeric CSV, last column the target; `classes` switches
    /// classification.
    Csv {
        train: PathBuf,
        test: PathBuf,
        classes: Option<usize>,
    },
}

/// Load or generate (train, validation, test) with an 80/20 train/validation
/// split, stratified for classification.
pub fn load_dataset(source: &DatasetSource, split_seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
    let (pool, test) = match source {
        DatasetSource::SyntheticBlobs { classes, dim, n_train, n_test, seed } => (
            synthetic_blobs(*classes, *dim, *n_train, *seed)?,
            synthetic_blobs(*classes, *dim, *n_test, seed.wrapping_add(1))?,
        ),
        DatasetSource::SyntheticShells { dim, n_train, n_test, seed } => (
            synthetic_shells(*dim, *n_train, *seed)?,
            synthetic_shells(*dim, *n_test, seed.wrapping_add(1))?,
        ),
        DatasetSource::SyntheticRegression { dim, n_train, n_test, seed } => (
            synthetic_regression(*dim, *n_train, *seed),
            synthetic_regression(*dim, *n_test, seed.wrapping_add(1)),
        ),
        DatasetSource::MnistSubset {
            train_images,
            train_labels,
            test_images,
            test_labels,
            n_train,
            n_test,
        } => (
            super::idx::load_idx_pair(train_images, train_labels, *n_train)?,
            super::idx::load_idx_pair(test_images, test_labels, *n_test)?,
        ),
        DatasetSource::Csv { train, test, classes } => (
            load_csv(train, *classes)?,
            load_csv(test, *classes)?,
        ),
    };
    pool.validate()?;
    test.validate()?;
    let (train, val) = pool.split(0.2, split_seed)?;
    Ok((train, val, test))
}

/// Gaussian blobs with exactly n/classes points per class (remainder spread
/// over the first classes).
pub fn synthetic_blobs(classes: usize, dim: usize, n: usize, seed: u64) -> Result<Dataset> {
    if classes < 2 || dim == 0 {
        return Err(Error::Config("blobs need >= 2 classes and dim >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..dim).map(|_| rng.gen_range(0.25..0.75)).collect())
        .collect();
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % classes;
        let point: Vec<f64> = centers[class]
            .iter()
            .map(|c| (c + gaussian(&mut rng) * 0.04).clamp(0.0, 1.0))
            .collect();
        features.push(point);
        labels.push(class);
    }
    Ok(Dataset { features, labels: Labels::Classes { labels, n_classes: classes } })
}

/// Two concentric shells around the cube center: inner radius band 0.15,
/// outer 0.35, both with half-width 0.04. Half the samples per class.
pub fn synthetic_shells(dim: usize, n: usize, seed: u64) -> Result<Dataset> {
    if dim == 0 {
        return Err(Error::Config("shells need dim >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let base_radius = if class == 0 { 0.15 } else { 0.35 };
        let radius = base_radius + rng.gen_range(-0.04..0.04);
        let mut direction: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        for d in &mut direction {
            *d = 0.5 + *d / norm * radius;
        }
        features.push(direction);
        labels.push(class);
    }
    Ok(Dataset { features, labels: Labels::Classes { labels, n_classes: 2 } })
}

/// Smooth nonlinear scalar target in [0, 1].
pub fn synthetic_regression(dim: usize, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let y = x
            .iter()
            .map(|xi| (2.0 * std::f64::consts::PI * xi).sin())
            .sum::<f64>()
            / dim as f64;
        values.push(0.5 + 0.5 * y);
        features.push(x);
    }
    Dataset { features, labels: Labels::Values(values) }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Min-max scale every feature column into [0, 1]; constant columns map
/// to 0.
fn normalize_columns(features: &mut [Vec<f64>]) {
    let dim = features.first().map_or(0, |f| f.len());
    for col in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in features.iter() {
            lo = lo.min(row[col]);
            hi = hi.max(row[col]);
        }
        let span = hi - lo;
        for row in features.iter_mut() {
            row[col] = if span > 0.0 { (row[col] - lo) / span } else { 0.0 };
        }
    }
}

/// Numeric CSV with the target in the last column, features min-max scaled
/// to [0, 1] on load. Classification targets must be integers below
/// `classes`.
pub fn load_csv(path: &std::path::Path, classes: Option<usize>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let mut features = Vec::new();
    let mut raw_targets = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::Format {
                format: "csv",
                reason: format!("line {} has fewer than two columns", line_no + 1),
            });
        }
        let mut row = Vec::with_capacity(fields.len() - 1);
        for f in &fields[..fields.len() - 1] {
            row.push(f.trim().parse::<f64>().map_err(|_| Error::Format {
                format: "csv",
                reason: format!("line {}: non-numeric feature {f:?}", line_no + 1),
            })?);
        }
        let target = fields[fields.len() - 1].trim().parse::<f64>().map_err(|_| Error::Format {
            format: "csv",
            reason: format!("line {}: non-numeric target", line_no + 1),
        })?;
        features.push(row);
        raw_targets.push(target);
    }
    let labels = match classes {
        Some(n_classes) => {
            let mut labels = Vec::with_capacity(raw_targets.len());
            for t in &raw_targets {
                let class = *t as usize;
                if t.fract() != 0.0 || class >= n_classes {
                    return Err(Error::Format {
                        format: "csv",
                        reason: format!("class label {t} outside 0..{n_classes}"),
                    });
                }
                labels.push(class);
            }
            Labels::Classes { labels, n_classes }
        }
        None => Labels::Values(raw_targets),
    };
    let mut ds = Dataset { features, labels };
    ds.validate()?;
    normalize_columns(&mut ds.features);
    Ok(ds)
}
