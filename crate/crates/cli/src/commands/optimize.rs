//! `optimize`: refine a vector set against outlet ratings; writes the
//! displaced vectors plus a trace report embedding the full configuration.

use std::path::Path;

use serde_json::json;

use ideoscale_core::optimizer::{optimize_vectors, OptimizationConfig};

use crate::error::{with_path, CliError};
use crate::formats::{self, round6};

#[allow(clippy::too_many_arguments)]
pub fn run(
    records_path: &Path,
    ratings_path: &Path,
    vectors_path: &Path,
    tau: f64,
    delta_default: f64,
    pin: &[String],
    seed: u64,
    initial_step: f64,
    min_step: f64,
    max_iterations: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(with_path(out_dir, e)))?;
    let baseline = formats::read_vectors_json(vectors_path)?;
    let registry = baseline.registry().clone();
    let records = formats::read_records_jsonl(records_path, &registry)?;
    let ratings = formats::read_ratings_csv(ratings_path)?;

    let mut pinned = Vec::with_capacity(pin.len());
    for name in pin {
        pinned.push(registry.id(name).ok_or_else(|| {
            CliError::validation(format!("--pin: party '{name}' is not in the vector set"))
        })?);
    }
    let mut config = OptimizationConfig::with_pinned(&registry, &pinned, delta_default, seed);
    config.tau = tau;
    config.initial_step = initial_step;
    config.min_step = min_step;
    config.max_iterations = max_iterations;

    let result = optimize_vectors(&baseline, &records, &ratings, &config)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    formats::write_vectors_json(&out_dir.join("optimized_vectors.json"), &result.vectors)?;

    let displacement: serde_json::Map<String, serde_json::Value> = registry
        .ids()
        .map(|id| {
            let (dx, dy) = result.displacement[id.index()];
            (
                registry.name(id).to_string(),
                json!([round6(dx), round6(dy)]),
            )
        })
        .collect();
    let per_outlet: Vec<serde_json::Value> = result
        .per_outlet
        .iter()
        .map(|o| {
            json!({
                "outlet": o.outlet,
                "n_political": o.n_political,
                "abs_error_before": round6(o.abs_error_before),
                "abs_error_after": round6(o.abs_error_after),
            })
        })
        .collect();
    let trace: Vec<serde_json::Value> = result
        .trace
        .iter()
        .map(|(i, mae)| json!([i, round6(*mae)]))
        .collect();
    let report = json!({
        "generated_at": formats::timestamp_now(),
        "config": {
            "tau": config.tau,
            "delta": registry
                .ids()
                .map(|id| (registry.name(id).to_string(), json!(config.delta[id.index()])))
                .collect::<serde_json::Map<_, _>>(),
            "seed": config.seed,
            "initial_step": config.initial_step,
            "min_step": config.min_step,
            "max_iterations": config.max_iterations,
        },
        "mae_before": round6(result.mae_before),
        "mae_after": round6(result.mae_after),
        "displacement": displacement,
        "per_outlet": per_outlet,
        "trace": trace,
    });
    formats::write_json(&out_dir.join("trace.json"), &report)?;
    Ok(())
}
