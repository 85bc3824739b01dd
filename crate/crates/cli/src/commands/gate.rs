//! `gate`: embedding-similarity check between originals and paraphrases.
//!
//! Both inputs are embedding JSONL files; pairs are matched by id, in the
//! order of the originals file.

use std::collections::HashMap;
use std::path::Path;

use serde_json::json;

use ideoscale_core::enrichment::similarity_gate;

use crate::error::CliError;
use crate::formats::{self, round6};

pub fn run(
    originals_path: &Path,
    paraphrases_path: &Path,
    threshold: f64,
    out: &Path,
) -> Result<(), CliError> {
    let originals = formats::read_embeddings_jsonl(originals_path)?;
    let paraphrases = formats::read_embeddings_jsonl(paraphrases_path)?;
    let mut by_id: HashMap<&str, &Vec<f64>> = HashMap::with_capacity(paraphrases.len());
    for p in &paraphrases {
        if by_id.insert(p.id.as_str(), &p.vector).is_some() {
            return Err(CliError::validation(format!(
                "{}: duplicate id '{}'",
                paraphrases_path.display(),
                p.id
            )));
        }
    }
    let mut left = Vec::with_capacity(originals.len());
    let mut right = Vec::with_capacity(originals.len());
    for o in &originals {
        let p = by_id.get(o.id.as_str()).ok_or_else(|| {
            CliError::validation(format!(
                "{}: id '{}' has no paraphrase embedding",
                originals_path.display(),
                o.id
            ))
        })?;
        left.push(o.vector.clone());
        right.push((*p).clone());
    }
    let report =
        similarity_gate(&left, &right, threshold).map_err(|e| CliError::Validation(e.to_string()))?;
    let value = json!({
        "generated_at": formats::timestamp_now(),
        "config": { "threshold": threshold },
        "n": report.n,
        "mean": round6(report.mean),
        "p05": round6(report.p05),
        "pass": report.pass,
    });
    formats::write_json(out, &value)?;
    println!(
        "gate: n={} mean={:.4} p05={:.4} -> {}",
        report.n,
        report.mean,
        report.p05,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(())
}
