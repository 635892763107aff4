//! IDX file parsing (the MNIST distribution format).
//!
//! Big-endian: a magic number (0x00000803 for 3-d image tensors, 0x00000801
//! for label vectors), one u32 per declared dimension, then the payload
//! bytes. Pixels are scaled to [0, 1].

use crate::error::{Error, Result};
use crate::harness::dataset::{Dataset, Labels};
use std::path::Path;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    let slice = bytes.get(offset..offset + 4).ok_or(Error::Format {
        format: "idx",
        reason: format!("truncated header at byte {offset}"),
    })?;
    Ok(u32::from_be_bytes([slice[0], slice[1], slice[2], slice[3]]))
}

/// Parse an IDX image tensor into flattened per-sample rows in [0, 1].
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::Format {
            format: "idx",
            reason: format!("bad image magic 0x{magic:08x}, want 0x{IMAGE_MAGIC:08x}"),
        });
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let rows = read_u32_be(bytes, 8)? as usize;
    let cols = read_u32_be(bytes, 12)? as usize;
    let pixel_count = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or(Error::Format { format: "idx", reason: "dimension overflow".into() })?;
    let payload = bytes.get(16..).unwrap_or(&[]);
    if payload.len() != pixel_count {
        return Err(Error::Format {
            format: "idx",
            reason: format!(
                "payload holds {} bytes, header declares {pixel_count}",
                payload.len()
            ),
        });
    }
    let per_image = rows * cols;
    Ok((0..count)
        .map(|i| {
            payload[i * per_image..(i + 1) * per_image]
                .iter()
                .map(|&b| b as f64 / 255.0)
                .collect()
        })
        .collect())
}

/// Parse an IDX label vector.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(Error::Format {
            format: "idx",
            reason: format!("bad label magic 0x{magic:08x}, want 0x{LABEL_MAGIC:08x}"),
        });
    }
    let count = read_u32_be(bytes, 4)? as usize;
    let payload = bytes.get(8..).unwrap_or(&[]);
    if payload.len() != count {
        return Err(Error::Format {
            format: "idx",
            reason: format!("payload holds {} labels, header declares {count}", payload.len()),
        });
    }
    Ok(payload.iter().map(|&b| b as usize).collect())
}

/// Load an image/label file pair, keeping at most `limit` samples
/// (0 means all).
pub fn load_idx_pair(images: &Path, labels: &Path, limit: usize) -> Result<Dataset> {
    let mut features = parse_idx_images(&std::fs::read(images)?)?;
    let mut class_labels = parse_idx_labels(&std::fs::read(labels)?)?;
    if features.len() != class_labels.len() {
        return Err(Error::Format {
            format: "idx",
            reason: format!("{} images vs {} labels", features.len(), class_labels.len()),
        });
    }
    if limit > 0 && limit < features.len() {
        features.truncate(limit);
        class_labels.truncate(limit);
    }
    let n_classes = class_labels.iter().max().map_or(0, |&m| m + 1);
    Ok(Dataset {
        features,
        labels: Labels::Classes { labels: class_labels, n_classes },
    })
}
