//! `associations`: inter-party correlation matrix from a stance CSV,
//! optionally combined with a second (sentiment) matrix.
//!
//! With one input, the output CSV is the symmetric correlation matrix with a
//! unit diagonal. With two inputs it mirrors the combined-triangle layout:
//! the lower triangle holds first-matrix correlations, the upper triangle
//! second-matrix correlations, and the diagonal the per-party profile
//! similarity between the two. Undefined cells stay empty.

use std::path::Path;
use std::sync::Arc;

use ideoscale_core::party::PartyRegistry;
use ideoscale_core::stats::{party_association, profile_similarity, AssociationMatrix};

use crate::error::{with_path, CliError};
use crate::formats;

fn write_matrix_csv(
    path: &Path,
    registry: &Arc<PartyRegistry>,
    cell: impl Fn(usize, usize) -> Option<f64>,
) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Io(with_path(path, e)))?;
    let mut header = vec!["party".to_string()];
    header.extend(registry.names().map(str::to_string));
    writer.write_record(&header)?;
    for (i, name) in registry.names().enumerate() {
        let mut row = vec![name.to_string()];
        for j in 0..registry.len() {
            row.push(cell(i, j).map_or(String::new(), |v| format!("{:.6}", v)));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

fn report_issues(assoc: &AssociationMatrix, registry: &Arc<PartyRegistry>, label: &str) {
    for (a, b, issue) in assoc.issues() {
        eprintln!(
            "warning: {label} association {} / {} undefined: {issue:?}",
            registry.name(*a),
            registry.name(*b)
        );
    }
}

pub fn run(
    stance: &Path,
    sentiment: Option<&Path>,
    out: &Path,
    registry: &Arc<PartyRegistry>,
) -> Result<(), CliError> {
    let ids: Vec<_> = registry.ids().collect();
    let stance_matrix = formats::read_stance_csv(stance, registry)?;
    let stance_assoc =
        party_association(&stance_matrix).map_err(|e| CliError::Validation(e.to_string()))?;
    report_issues(&stance_assoc, registry, "stance");

    match sentiment {
        None => write_matrix_csv(out, registry, |i, j| stance_assoc.get(ids[i], ids[j])),
        Some(sentiment_path) => {
            let sentiment_matrix = formats::read_stance_csv(sentiment_path, registry)?;
            let sentiment_assoc = party_association(&sentiment_matrix)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            report_issues(&sentiment_assoc, registry, "sentiment");
            let similarity = profile_similarity(&stance_assoc, &sentiment_assoc)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            write_matrix_csv(out, registry, |i, j| {
                if i == j {
                    Some(similarity[i].1)
                } else if i > j {
                    stance_assoc.get(ids[i], ids[j])
                } else {
                    sentiment_assoc.get(ids[i], ids[j])
                }
            })
        }
    }
}
