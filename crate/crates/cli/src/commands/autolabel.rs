//! `autolabel`: parliamentary protocol files in, labeled training CSV out.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ideoscale_core::autolabel::{extract_sentiments, filter_positive, parse_protocol, ExtractionRules};
use ideoscale_core::party::PartyRegistry;

use crate::error::{with_path, CliError};
use crate::formats;

pub fn run(
    protocols: &[PathBuf],
    out: &Path,
    registry: &Arc<PartyRegistry>,
    include_self_party: bool,
    positive_only: bool,
) -> Result<(), CliError> {
    if protocols.is_empty() {
        return Err(CliError::validation("autolabel needs at least one protocol file"));
    }
    let rules = ExtractionRules {
        exclude_self_party: !include_self_party,
        ..Default::default()
    };

    let mut rows = Vec::new();
    for path in protocols {
        let file = File::open(path).map_err(|e| CliError::Io(with_path(path, e)))?;
        let speeches = parse_protocol(BufReader::new(file), registry)
            .map_err(|e| CliError::Validation(with_path(path, e)))?;
        rows.extend(extract_sentiments(&speeches, &rules));
    }
    if positive_only {
        rows = filter_positive(rows);
    }
    formats::write_labeled_csv(out, &rows, registry)?;
    Ok(())
}
