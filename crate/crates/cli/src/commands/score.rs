//! `score`: stream records JSONL through the projection.
//!
//! Exactly one output line per input line (blank lines pass through blank);
//! per-line validation errors emit an `{"error": ...}` line and are
//! collected into a sidecar file next to the output. The run is
//! deterministic for any thread count: lines are scored independently and
//! reassembled in input order.

use std::io::Write;
use std::path::{Path, PathBuf};

use ideoscale_core::positioning::PartyVectorSet;
use ideoscale_core::projection::score_record;
use ideoscale_core::record::{validate_record, RawRecord};

use crate::error::{with_path, CliError};
use crate::formats::ScoredLine;

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".errors");
    out.with_file_name(name)
}

fn score_line(line: &str, vectors: &PartyVectorSet, tau: f64) -> Result<String, String> {
    if line.trim().is_empty() {
        return Ok(String::new());
    }
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let record = validate_record(raw, vectors.registry()).map_err(|e| e.to_string())?;
    let score = score_record(&record, vectors, tau)
        .map_err(|e| format!("record '{}': {e}", record.record_id))?;
    let out = ScoredLine::new(record.to_raw(), score);
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn run(
    records: &Path,
    vectors_path: &Path,
    tau: f64,
    threads: usize,
    out: &Path,
) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(CliError::validation(format!("--tau {tau} outside [0, 1]")));
    }
    let vectors = crate::formats::read_vectors_json(vectors_path)?;
    let input = std::fs::read_to_string(records).map_err(|e| CliError::Io(with_path(records, e)))?;
    let lines: Vec<&str> = input.lines().collect();

    let results: Vec<Result<String, String>> = if threads <= 1 {
        lines
            .iter()
            .map(|line| score_line(line, &vectors, tau))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::validation(format!("--threads: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            lines
                .par_iter()
                .map(|line| score_line(line, &vectors, tau))
                .collect()
        })
    };

    let mut output = std::fs::File::create(out).map_err(|e| CliError::Io(with_path(out, e)))?;
    let mut errors = Vec::new();
    for (i, result) in results.iter().enumerate() {
        match result {
            Ok(line) => writeln!(output, "{line}")?,
            Err(reason) => {
                writeln!(output, "{{\"error\":{}}}", serde_json::to_string(reason)?)?;
                errors.push(format!("line {}: {reason}", i + 1));
            }
        }
    }
    output.flush()?;

    if !errors.is_empty() {
        let sidecar = sidecar_path(out);
        std::fs::write(&sidecar, errors.join("\n") + "\n")
            .map_err(|e| CliError::Io(with_path(&sidecar, e)))?;
        return Err(CliError::validation(format!(
            "{} record(s) failed validation; details in {}",
            errors.len(),
            sidecar.display()
        )));
    }
    Ok(())
}
