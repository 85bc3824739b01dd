//! `evaluate-news` and `evaluate-tweets`: aggregate a scored corpus against
//! ground truth and write CSV + JSON reports.

use std::path::Path;

use serde_json::json;

use ideoscale_core::evaluation::{
    corpus_mae_mse, estimate_outlets, tweet_accuracy_by_length, Buckets,
};
use ideoscale_core::party::PartyRegistry;

use crate::error::{with_path, CliError};
use crate::formats::{self, round6};

pub fn run_news(
    scored: &Path,
    ratings_path: &Path,
    tau: f64,
    out_dir: &Path,
) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(CliError::validation(format!("--tau {tau} outside [0, 1]")));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(with_path(out_dir, e)))?;
    let registry = PartyRegistry::german_default();
    let records = formats::read_scored_jsonl(scored, &registry)?;
    let ratings = formats::read_ratings_csv(ratings_path)?;
    let estimates =
        estimate_outlets(&records, &ratings, tau).map_err(|e| CliError::Validation(e.to_string()))?;

    let csv_path = out_dir.join("outlets.csv");
    let mut writer =
        csv::Writer::from_path(&csv_path).map_err(|e| CliError::Io(with_path(&csv_path, e)))?;
    writer.write_record(["outlet", "n_total", "n_political", "mean_score", "abs_error"])?;
    for e in &estimates {
        writer.write_record([
            e.outlet.clone(),
            e.n_total.to_string(),
            e.n_political.to_string(),
            e.mean_score.map_or(String::new(), |v| format!("{:.6}", v)),
            e.abs_error.map_or(String::new(), |v| format!("{:.6}", v)),
        ])?;
    }
    writer.flush()?;

    let (mae, mse, pct) =
        corpus_mae_mse(&estimates).map_err(|e| CliError::Validation(e.to_string()))?;
    let summary = json!({
        "generated_at": formats::timestamp_now(),
        "config": { "tau": tau },
        "n_outlets": estimates.len(),
        "n_outlets_with_scores": estimates.iter().filter(|e| e.abs_error.is_some()).count(),
        "mae": round6(mae),
        "mse": round6(mse),
        "pct_of_scale": round6(pct),
    });
    formats::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(())
}

/// Bucket spec: comma-separated ascending edges, optionally ending with `+`
/// for an open last bucket, e.g. `1,10,20,50,100,+`.
pub fn parse_buckets(spec: &str) -> Result<Buckets, CliError> {
    let mut edges = Vec::new();
    let mut open_end = false;
    for (i, token) in spec.split(',').map(str::trim).enumerate() {
        if token == "+" || token.eq_ignore_ascii_case("inf") {
            open_end = true;
            continue;
        }
        edges.push(token.parse::<u64>().map_err(|_| {
            CliError::validation(format!("--buckets: token {} ('{token}') is not a number", i + 1))
        })?);
    }
    Buckets::new(edges, open_end).map_err(|e| CliError::validation(format!("--buckets: {e}")))
}

pub fn run_tweets(scored: &Path, buckets_spec: &str, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(with_path(out_dir, e)))?;
    let registry = PartyRegistry::german_default();
    let buckets = parse_buckets(buckets_spec)?;
    let scored_records = formats::read_scored_jsonl(scored, &registry)?;
    let records: Vec<_> = scored_records.into_iter().map(|s| s.record).collect();
    let report = tweet_accuracy_by_length(&records, &buckets)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }

    let csv_path = out_dir.join("buckets.csv");
    let mut writer =
        csv::Writer::from_path(&csv_path).map_err(|e| CliError::Io(with_path(&csv_path, e)))?;
    writer.write_record(["bucket_lo", "bucket_hi", "midpoint", "n", "accuracy"])?;
    for b in &report.buckets {
        writer.write_record([
            b.bucket_lo.to_string(),
            b.bucket_hi.map_or(String::new(), |h| h.to_string()),
            format!("{}", b.midpoint),
            b.n.to_string(),
            if b.n > 0 {
                format!("{:.6}", b.accuracy)
            } else {
                String::new()
            },
        ])?;
    }
    writer.flush()?;

    let summary = json!({
        "generated_at": formats::timestamp_now(),
        "config": { "buckets": buckets_spec },
        "n_records": records.len(),
        "length_accuracy_r": if report.r.is_nan() { serde_json::Value::Null } else { json!(round6(report.r)) },
        "warnings": report.warnings,
    });
    formats::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(())
}
