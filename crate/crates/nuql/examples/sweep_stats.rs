//! A miniature sweep: classical vs unitary vs post-selected layers over a
//! shared seed set, then the full statistics pipeline — Bessel-corrected
//! spread, Welch's t-test, variance reduction, both efficiency metrics — and
//! the CSV/JSON reports.
//!
//! ```bash
//! cargo run --release --example sweep_stats
//! ```

use nuql::harness::config::ExperimentConfig;
use nuql::harness::report::{emit_reports, summarize, summary_csv};
use nuql::harness::sweep::run_sweep;

fn main() -> nuql::Result<()> {
    let out_dir = std::env::temp_dir().join("nuql_sweep_stats_example");
    let _ = std::fs::remove_dir_all(&out_dir);
    let config = ExperimentConfig::from_json(&format!(
        r#"{{
        "dataset": {{"kind": "synthetic_shells", "dim": 8,
                     "n_train": 700, "n_test": 280, "seed": 7}},
        "variants": ["classical", "nolcu", "lcu"],
        "qubit_scales": [3],
        "runs_per_config": 3,
        "n_blocks": 4,
        "extractor_hidden": [32, 16],
        "head_hidden": [64],
        "train": {{"learning_rate": 0.003, "max_epochs": 25, "patience": 5, "seed": 42}},
        "output_dir": {:?},
        "workers": 3
    }}"#,
        out_dir
    ))?;

    println!("running {} cells into {} ...", config.cells().len(), out_dir.display());
    let records = run_sweep(&config)?;
    for record in &records {
        println!(
            "  {}: {:.2}% ({} epochs{})",
            record.id,
            record.metric.unwrap_or(f64::NAN),
            record.epochs_trained,
            record
                .mean_success_prob
                .map_or(String::new(), |p| format!(", acceptance {p:.3}")),
        );
    }

    let summaries = summarize(&records)?;
    println!("\n{}", summary_csv(&summaries));
    let report_dir = out_dir.join("report");
    emit_reports(&summaries, &records, &report_dir)?;
    println!("reports written to {}", report_dir.display());

    // rerunning the same config trains nothing: records are keyed by cell id
    let again = run_sweep(&config)?;
    println!("\nrerun loaded {} existing records (no retraining)", again.len());
    Ok(())
}
