pub mod associations;
pub mod autolabel;
pub mod evaluate;
pub mod gate;
pub mod optimize;
pub mod paraphrase;
pub mod positions;
pub mod score;
pub mod validity;

use std::sync::Arc;

use ideoscale_core::party::PartyRegistry;

use crate::error::CliError;

/// Registry from a `--parties` flag (comma-separated, ordered) or the
/// German default.
pub fn registry_from_flag(parties: Option<&str>) -> Result<Arc<PartyRegistry>, CliError> {
    match parties {
        None => Ok(PartyRegistry::german_default()),
        Some(spec) => {
            let names: Vec<&str> = spec
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            PartyRegistry::new(names)
                .map(Arc::new)
                .map_err(|e| CliError::validation(format!("--parties: {e}")))
        }
    }
}
