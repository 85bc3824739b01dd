//! `positions`: stance CSV in, party-vector JSON out.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use ideoscale_core::party::PartyRegistry;
use ideoscale_core::positioning::{
    build_vector_set, german_default_layout, Aggregation, Anchors, Placement, Side,
};

use crate::error::{with_path, CliError};
use crate::formats;

/// Placement file for non-default registries: the three anchors plus each
/// remaining party's side. Left-side parties are measured against the left
/// anchor and the center anchor, right-side parties against the right
/// anchor and the center anchor.
#[derive(Debug, Deserialize)]
struct PlacementFile {
    left_anchor: String,
    center_anchor: String,
    right_anchor: String,
    sides: BTreeMap<String, Side>,
}

fn layout_from_file(
    path: &Path,
    registry: &Arc<PartyRegistry>,
) -> Result<(Anchors, BTreeMap<ideoscale_core::PartyId, Placement>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(with_path(path, e)))?;
    let parsed: PlacementFile =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(with_path(path, e)))?;
    let lookup = |name: &str| {
        registry.id(name).ok_or_else(|| {
            CliError::validation(format!(
                "{}: party '{name}' is not in the registry",
                path.display()
            ))
        })
    };
    let anchors = Anchors {
        left: lookup(&parsed.left_anchor)?,
        center: lookup(&parsed.center_anchor)?,
        right: lookup(&parsed.right_anchor)?,
    };
    let mut placements = BTreeMap::new();
    for (name, side) in &parsed.sides {
        let party = lookup(name)?;
        placements.insert(
            party,
            Placement {
                side: *side,
                extreme: match side {
                    Side::Left => anchors.left,
                    Side::Right => anchors.right,
                },
                center: anchors.center,
            },
        );
    }
    Ok((anchors, placements))
}

pub fn run(
    stance: &Path,
    out: &Path,
    registry: &Arc<PartyRegistry>,
    placement: Option<&Path>,
    aggregation: Aggregation,
) -> Result<(), CliError> {
    let (anchors, placements) = match placement {
        Some(path) => layout_from_file(path, registry)?,
        None => german_default_layout(registry).ok_or_else(|| {
            CliError::validation(
                "registry does not contain the default party set; pass --placement",
            )
        })?,
    };
    let matrix = formats::read_stance_csv(stance, registry)?;
    let set = build_vector_set(&matrix, &anchors, &placements, aggregation)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    formats::write_vectors_json(out, &set)?;
    Ok(())
}
