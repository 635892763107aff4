//! Cross-run aggregation and report emission.
//!
//! `summarize` folds run records into per-cell statistics with the paper-style
//! comparison columns: mean with Bessel-corrected spread, the contrast
//! against the matched baseline (Welch t/df/p, variance reduction), and both
//! parameter-efficiency metrics. `emit_reports` writes a CSV table (one row
//! per cell) and a JSON document carrying full per-run provenance.

use crate::error::{Error, Result};
use crate::fisher::{fisher_efficiency, fisher_efficiency_perf};
use crate::harness::config::VariantChoice;
use crate::harness::stats::{mean, std_bessel, variance_reduction, welch_t_test};
use crate::harness::sweep::{MetricKind, RunRecord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Aggregate statistics of one (variant, qubits) cell.
///
/// Comparison fields hold values only where a counterpart cell exists: the
/// unitary baseline at the same qubit count for the LCU variant, the
/// classical baseline for the IQP variants. Absent counterparts leave the
/// fields empty rather than zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub variant: VariantChoice,
    pub qubits: usize,
    pub n_runs: usize,
    pub metric_kind: MetricKind,
    pub mean: f64,
    pub std: f64,
    pub n_trainable: usize,
    pub mean_success_prob: Option<f64>,
    /// mean minus the counterpart's mean.
    pub improvement: Option<f64>,
    pub welch_t: Option<f64>,
    pub welch_df: Option<f64>,
    pub p_value: Option<f64>,
    /// 1 - std / counterpart std.
    pub variance_reduction: Option<f64>,
    /// Parameter-count efficiency vs the classical cell, percent.
    pub eta_param_pct: Option<f64>,
    /// Performance-ratio efficiency (needs lcu, nolcu, and classical cells),
    /// percent.
    pub eta_perf_pct: Option<f64>,
}

/// Everything a report carries; round-trips through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub generated_by: String,
    pub summaries: Vec<CellSummary>,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone)]
struct CellGroup {
    variant: VariantChoice,
    qubits: usize,
    metric_kind: MetricKind,
    metrics: Vec<f64>,
    success: Vec<f64>,
    n_trainable: usize,
}

/// Which cell a variant is contrasted against in the summary table.
fn counterpart(variant: VariantChoice) -> Option<VariantChoice> {
    match variant {
        VariantChoice::Lcu => Some(VariantChoice::Nolcu),
        VariantChoice::IqpLayer | VariantChoice::IqpEmbedding => Some(VariantChoice::Classical),
        VariantChoice::Classical | VariantChoice::Nolcu => None,
    }
}

/// Fold records into per-cell summaries. Every cell needs at least two
/// completed runs for the Bessel-corrected spread to exist.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<CellSummary>> {
    let mut groups: BTreeMap<(usize, &'static str), CellGroup> = BTreeMap::new();
    for record in records.iter().filter(|r| r.is_ok()) {
        let key = (record.qubits, record.variant.name());
        let group = groups.entry(key).or_insert_with(|| CellGroup {
            variant: record.variant,
            qubits: record.qubits,
            metric_kind: record.metric_kind,
            metrics: Vec::new(),
            success: Vec::new(),
            n_trainable: record.n_trainable,
        });
        if let Some(m) = record.metric {
            group.metrics.push(m);
        }
        if let Some(p) = record.mean_success_prob {
            group.success.push(p);
        }
    }
    if groups.is_empty() {
        return Err(Error::InsufficientSamples { needed: 2, got: 0 });
    }
    for group in groups.values() {
        if group.metrics.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: group.metrics.len() });
        }
    }

    let lookup = |variant: VariantChoice, qubits: usize| -> Option<&CellGroup> {
        groups.get(&(qubits, variant.name()))
    };

    let mut summaries = Vec::with_capacity(groups.len());
    for group in groups.values() {
        let cell_mean = mean(&group.metrics);
        let cell_std = std_bessel(&group.metrics)?;
        let mut summary = CellSummary {
            variant: group.variant,
            qubits: group.qubits,
            n_runs: group.metrics.len(),
            metric_kind: group.metric_kind,
            mean: cell_mean,
            std: cell_std,
            n_trainable: group.n_trainable,
            mean_success_prob: if group.success.is_empty() {
                None
            } else {
                Some(mean(&group.success))
            },
            improvement: None,
            welch_t: None,
            welch_df: None,
            p_value: None,
            variance_reduction: None,
            eta_param_pct: None,
            eta_perf_pct: None,
        };

        if let Some(other) = counterpart(group.variant).and_then(|v| lookup(v, group.qubits)) {
            summary.improvement = Some(cell_mean - mean(&other.metrics));
            let test = welch_t_test(&group.metrics, &other.metrics)?;
            summary.welch_t = Some(test.t);
            summary.welch_df = Some(test.df);
            summary.p_value = Some(test.p);
            summary.variance_reduction =
                variance_reduction(cell_std, std_bessel(&other.metrics)?);
        }

        if group.variant != VariantChoice::Classical {
            if let Some(classical) = lookup(VariantChoice::Classical, group.qubits) {
                summary.eta_param_pct =
                    Some(fisher_efficiency(classical.n_trainable, group.n_trainable)?);
                if group.variant == VariantChoice::Lcu {
                    if let Some(nolcu) = lookup(VariantChoice::Nolcu, group.qubits) {
                        summary.eta_perf_pct = Some(fisher_efficiency_perf(
                            cell_mean,
                            mean(&nolcu.metrics),
                            mean(&classical.metrics),
                        )?);
                    }
                }
            }
        }
        summaries.push(summary);
    }
    Ok(summaries)
}

fn opt(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| format!("{v}"))
}

/// CSV table, one row per cell. Numeric fields use '.' decimals and no
/// thousands separators; absent comparisons stay empty.
pub fn summary_csv(summaries: &[CellSummary]) -> String {
    let mut out = String::from(
        "variant,qubits,n_runs,metric_kind,mean,std,n_trainable,mean_success_prob,\
         improvement,welch_t,welch_df,p_value,variance_reduction,eta_param_pct,eta_perf_pct\n",
    );
    for s in summaries {
        let kind = match s.metric_kind {
            MetricKind::AccuracyPercent => "accuracy_percent",
            MetricKind::Mae => "mae",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.variant.name(),
            s.qubits,
            s.n_runs,
            kind,
            s.mean,
            s.std,
            s.n_trainable,
            opt(s.mean_success_prob),
            opt(s.improvement),
            opt(s.welch_t),
            opt(s.welch_df),
            opt(s.p_value),
            opt(s.variance_reduction),
            opt(s.eta_param_pct),
            opt(s.eta_perf_pct),
        ));
    }
    out
}

/// Write `summary.csv` and `summary.json` into `out_dir`.
pub fn emit_reports(
    summaries: &[CellSummary],
    records: &[RunRecord],
    out_dir: &Path,
) -> Result<SummaryDocument> {
    if summaries.is_empty() {
        return Err(Error::Config("nothing to report: empty summary".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("summary.csv"), summary_csv(summaries))?;
    let document = SummaryDocument {
        generated_by: format!("nuql {}", env!("CARGO_PKG_VERSION")),
        summaries: summaries.to_vec(),
        runs: records.to_vec(),
    };
    std::fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&document)?,
    )?;
    Ok(document)
}
