//! Experiment orchestration: datasets, sweeps, statistics, and reports.

pub mod checkpoint;
pub mod config;
pub mod dataset;
pub mod idx;
pub mod report;
pub mod stats;
pub mod sweep;
