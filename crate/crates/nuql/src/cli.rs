//! Command-line interface: `run`, `stats`, `qfi`, and `verify`.
//!
//! The binary is a thin shell over the library; everything here is callable
//! programmatically too. Environment overrides: `NUQL_OUTPUT_DIR` replaces
//! the config's output directory, `NUQL_WORKERS` the worker count.

use crate::error::{Error, Result};
use crate::fisher::QfiResult;
use crate::harness::checkpoint::Checkpoint;
use crate::harness::config::ExperimentConfig;
use crate::harness::report::{emit_reports, summarize};
use crate::harness::sweep::{load_records, run_sweep, RunStatus};
use serde::Serialize;
use std::path::PathBuf;

const USAGE: &str = "\
usage: nuql <command> [options]

commands:
  run    --config <file> [--resume] [--workers <k>]
         execute the configured sweep; completed cells are skipped by id
  stats  --input <dir> --out <dir>
         aggregate run records into summary.csv and summary.json
  qfi    --checkpoint <file> --at <init|final> [--inputs <csv>] [--out <file>]
         quantum Fisher information of a checkpointed layer
  verify
         run the oracle and property suites

environment:
  NUQL_OUTPUT_DIR  overrides the sweep output directory
  NUQL_WORKERS     overrides the worker count
";

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args(args: &[String]) -> i32 {
    match dispatch(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(args: &[String]) -> Result<i32> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("stats") => cmd_stats(&args[1..]),
        Some("qfi") => cmd_qfi(&args[1..]),
        Some("verify") => cmd_verify(),
        Some("--help") | Some("-h") | None => {
            print!("{USAGE}");
            Ok(if args.is_empty() { 2 } else { 0 })
        }
        Some(other) => {
            eprintln!("unknown command {other:?}\n");
            print!("{USAGE}");
            Ok(2)
        }
    }
}

struct Flags {
    values: Vec<(String, Option<String>)>,
}

impl Flags {
    fn parse(args: &[String], value_flags: &[&str], bare_flags: &[&str]) -> Result<Flags> {
        let mut values = Vec::new();
        let mut iter = args.iter().peekable();
        while let Some(arg) = iter.next() {
            if bare_flags.contains(&arg.as_str()) {
                values.push((arg.clone(), None));
            } else if value_flags.contains(&arg.as_str()) {
                let value = iter
                    .next()
                    .ok_or_else(|| Error::Config(format!("{arg} needs a value")))?;
                values.push((arg.clone(), Some(value.clone())));
            } else {
                return Err(Error::Config(format!("unexpected argument {arg:?}")));
            }
        }
        Ok(Flags { values })
    }

    fn get(&self, flag: &str) -> Option<&str> {
        self.values
            .iter()
            .find(|(name, _)| name == flag)
            .and_then(|(_, v)| v.as_deref())
    }

    fn has(&self, flag: &str) -> bool {
        self.values.iter().any(|(name, _)| name == flag)
    }
}

fn cmd_run(args: &[String]) -> Result<i32> {
    let flags = Flags::parse(args, &["--config", "--workers"], &["--resume"])?;
    let config_path = flags
        .get("--config")
        .ok_or_else(|| Error::Config("run needs --config <file>".into()))?;
    let mut config = ExperimentConfig::load(&PathBuf::from(config_path))?;

    if let Ok(dir) = std::env::var("NUQL_OUTPUT_DIR") {
        config.output_dir = PathBuf::from(dir);
    }
    if let Some(workers) = flags.get("--workers") {
        config.workers = workers
            .parse()
            .map_err(|_| Error::Config(format!("bad --workers value {workers:?}")))?;
    }
    if let Ok(workers) = std::env::var("NUQL_WORKERS") {
        config.workers = workers
            .parse()
            .map_err(|_| Error::Config(format!("bad NUQL_WORKERS value {workers:?}")))?;
    }
    let _ = flags.has("--resume"); // sweeps always skip completed cells

    let records = run_sweep(&config)?;
    let mut failed = 0usize;
    for record in &records {
        match &record.status {
            RunStatus::Ok => println!(
                "{}: metric {:.4}{} epochs {} ({:.1}s)",
                record.id,
                record.metric.unwrap_or(f64::NAN),
                record
                    .mean_success_prob
                    .map_or(String::new(), |p| format!(", mean success {p:.3},")),
                record.epochs_trained,
                record.wall_time_s,
            ),
            RunStatus::Error { message } => {
                failed += 1;
                println!("{}: FAILED ({message})", record.id);
            }
        }
    }
    println!(
        "{} records in {} ({} failed)",
        records.len(),
        config.output_dir.display(),
        failed
    );
    Ok(if failed > 0 { 1 } else { 0 })
}

fn cmd_stats(args: &[String]) -> Result<i32> {
    let flags = Flags::parse(args, &["--input", "--out"], &[])?;
    let input = flags
        .get("--input")
        .ok_or_else(|| Error::Config("stats needs --input <dir>".into()))?;
    let out = flags
        .get("--out")
        .ok_or_else(|| Error::Config("stats needs --out <dir>".into()))?;
    let records = load_records(&PathBuf::from(input))?;
    if records.is_empty() {
        return Err(Error::Config(format!("no records under {input}")));
    }
    let summaries = summarize(&records)?;
    let out_dir = PathBuf::from(out);
    emit_reports(&summaries, &records, &out_dir)?;
    println!(
        "{} cells summarized from {} records -> {}",
        summaries.len(),
        records.len(),
        out_dir.join("summary.csv").display()
    );
    Ok(0)
}

#[derive(Serialize)]
struct QfiReport {
    checkpoint: String,
    cell: String,
    at: String,
    n_params: usize,
    inputs_evaluated: usize,
    qfi: QfiResult,
}

fn cmd_qfi(args: &[String]) -> Result<i32> {
    let flags = Flags::parse(args, &["--checkpoint", "--at", "--inputs", "--out"], &[])?;
    let path = flags
        .get("--checkpoint")
        .ok_or_else(|| Error::Config("qfi needs --checkpoint <file>".into()))?;
    let at = flags.get("--at").unwrap_or("final");
    if at != "init" && at != "final" {
        return Err(Error::Config(format!("--at must be init or final, got {at:?}")));
    }
    let checkpoint = Checkpoint::load(&PathBuf::from(path))?;
    let spec = checkpoint
        .model
        .arch
        .quantum
        .ok_or_else(|| Error::Config("checkpoint holds a classical model; no QFI".into()))?;
    let thetas = if at == "init" {
        checkpoint.quantum_params_init.clone()
    } else {
        checkpoint.model.quantum_params.clone()
    };

    // evaluation points: supplied feature rows, averaged, or the zero input
    let input_rows: Vec<Vec<f64>> = match flags.get("--inputs") {
        Some(csv) => {
            let text = std::fs::read_to_string(csv)?;
            let mut rows = Vec::new();
            for (line_no, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let row: std::result::Result<Vec<f64>, _> =
                    line.split(',').map(|f| f.trim().parse::<f64>()).collect();
                let row = row.map_err(|_| Error::Format {
                    format: "csv",
                    reason: format!("line {}: non-numeric feature", line_no + 1),
                })?;
                if row.len() != spec.n_inputs() {
                    return Err(Error::LengthMismatch {
                        what: "input features",
                        expected: spec.n_inputs(),
                        got: row.len(),
                    });
                }
                rows.push(row);
            }
            if rows.is_empty() {
                return Err(Error::Config("inputs file holds no rows".into()));
            }
            rows
        }
        None => vec![vec![0.0; spec.n_inputs()]],
    };

    let p = thetas.len();
    let mut matrix = vec![vec![0.0; p]; p];
    for inputs in &input_rows {
        let qfi = crate::fisher::qfi_matrix(&spec, &thetas, inputs)?;
        for i in 0..p {
            for j in 0..p {
                matrix[i][j] += qfi.matrix[i][j] / input_rows.len() as f64;
            }
        }
    }
    let trace = (0..p).map(|i| matrix[i][i]).sum();
    let report = QfiReport {
        checkpoint: path.to_string(),
        cell: checkpoint.cell.clone(),
        at: at.to_string(),
        n_params: p,
        inputs_evaluated: input_rows.len(),
        qfi: QfiResult { matrix, trace },
    };
    let text = serde_json::to_string_pretty(&report)?;
    match flags.get("--out") {
        Some(out) => std::fs::write(out, text)?,
        None => println!("{text}"),
    }
    eprintln!(
        "QFI at {at} of {}: trace (effective dimension) = {:.6}",
        checkpoint.cell, report.qfi.trace
    );
    Ok(0)
}

fn cmd_verify() -> Result<i32> {
    let results = crate::oracle::verify::run_all();
    let mut failed = 0usize;
    for result in &results {
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!("{status} {} - {}", result.name, result.detail);
        if !result.passed {
            failed += 1;
        }
    }
    println!("{}/{} suites passed", results.len() - failed, results.len());
    Ok(if failed > 0 { 1 } else { 0 })
}
