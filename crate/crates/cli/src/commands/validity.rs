//! `validity`: convergent-validity statistics between three rating sources.
//!
//! Source A rates outlets on a 1-7 survey scale; source B uses two
//! correlated five-point expert scales (reduced to one principal
//! component); source C provides numeric scores on a -10..10 scale plus
//! ordinal labels (left .. right). Correlations are computed over pairwise
//! complete cases, once over all rows and once restricted to the scraped
//! sample (rows with an article count).

use std::path::Path;

use serde_json::json;

use ideoscale_core::stats::{ordinal_from_label, pc1_two_scales, pearson, spearman, z_transform};

use crate::error::CliError;
use crate::formats::{self, round6, SourceRow};

fn correlation_entry(n: usize, value: Result<f64, impl std::fmt::Display>) -> serde_json::Value {
    match value {
        Ok(v) => json!({ "n": n, "value": round6(v) }),
        Err(e) => json!({ "n": n, "value": null, "reason": e.to_string() }),
    }
}

fn paired<'r>(
    rows: &'r [SourceRow],
    sample_only: bool,
    x: impl Fn(&SourceRow) -> Option<f64> + 'r,
    y: impl Fn(&SourceRow) -> Option<f64> + 'r,
) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in rows {
        if sample_only && !row.in_sample() {
            continue;
        }
        if let (Some(a), Some(b)) = (x(row), y(row)) {
            xs.push(a);
            ys.push(b);
        }
    }
    (xs, ys)
}

pub fn run(sources: &Path, out: &Path) -> Result<(), CliError> {
    let rows = formats::read_sources_csv(sources)?;

    // ordinal codes from the source-C labels
    let mut ordinals: Vec<Option<f64>> = Vec::with_capacity(rows.len());
    for row in &rows {
        ordinals.push(match row.c_label.as_deref() {
            None => None,
            Some(label) => Some(
                ordinal_from_label(label)
                    .map_err(|e| CliError::validation(format!("{}: {e}", row.media)))?
                    as f64,
            ),
        });
    }

    let a_of = |r: &SourceRow| r.a_rating;
    let c_num_of = |r: &SourceRow| r.c_rating;

    let paired_with_ord = |sample_only: bool| {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if sample_only && !row.in_sample() {
                continue;
            }
            if let (Some(a), Some(o)) = (row.a_rating, ordinals[i]) {
                xs.push(a);
                ys.push(o);
            }
        }
        (xs, ys)
    };

    // A vs C ordinal (Spearman)
    let (ax, co) = paired_with_ord(false);
    let spearman_full = correlation_entry(ax.len(), spearman(&ax, &co));
    let (axs, cos) = paired_with_ord(true);
    let spearman_sample = correlation_entry(axs.len(), spearman(&axs, &cos));

    // A vs C numeric (Pearson; z-transforming either side leaves r unchanged)
    let (ax, cn) = paired(&rows, false, a_of, c_num_of);
    let pearson_full = correlation_entry(ax.len(), pearson(&ax, &cn));
    let (axs, cns) = paired(&rows, true, a_of, c_num_of);
    let pearson_sample = correlation_entry(axs.len(), pearson(&axs, &cns));

    // B's two scales against each other, and their first principal component
    // against A
    let (bx, by) = paired(&rows, false, |r| r.b_x, |r| r.b_y);
    let b_scales = correlation_entry(bx.len(), pearson(&bx, &by));
    let pc1_vs_a = match pc1_two_scales(&bx, &by) {
        Ok(scores) => {
            // align PC1 scores (computed over complete B rows) back to rows
            let mut iter = scores.iter();
            let mut a_vals = Vec::new();
            let mut pc_vals = Vec::new();
            for row in &rows {
                if row.b_x.is_some() && row.b_y.is_some() {
                    let pc = *iter.next().expect("one score per complete B row");
                    if let Some(a) = row.a_rating {
                        a_vals.push(a);
                        pc_vals.push(pc);
                    }
                }
            }
            correlation_entry(a_vals.len(), pearson(&a_vals, &pc_vals))
        }
        Err(e) => correlation_entry(0, Err::<f64, _>(e)),
    };

    // z-scores of source A over all rated rows
    let a_all: Vec<f64> = rows.iter().filter_map(|r| r.a_rating).collect();
    let z_a = z_transform(&a_all).ok();
    let z_entries: Vec<serde_json::Value> = match &z_a {
        None => Vec::new(),
        Some(z) => {
            let mut iter = z.iter();
            rows.iter()
                .filter(|r| r.a_rating.is_some())
                .map(|r| json!({ "media": r.media, "z": round6(*iter.next().unwrap()) }))
                .collect()
        }
    };

    let report = json!({
        "generated_at": formats::timestamp_now(),
        "config": { "sources": sources.display().to_string() },
        "n_rows": rows.len(),
        "n_sample_rows": rows.iter().filter(|r| r.in_sample()).count(),
        "spearman_a_vs_c_ordinal": spearman_full,
        "spearman_a_vs_c_ordinal_sample": spearman_sample,
        "pearson_a_vs_c_numeric": pearson_full,
        "pearson_a_vs_c_numeric_sample": pearson_sample,
        "pearson_b_scales": b_scales,
        "pearson_a_vs_b_pc1": pc1_vs_a,
        "z_scores_a": z_entries,
    });
    formats::write_json(out, &report)?;
    Ok(())
}
