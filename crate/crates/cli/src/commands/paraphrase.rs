//! `paraphrase`: one-shot paraphrase of a text through the configured
//! provider (or the offline mock).

use ideoscale_core::enrichment::{self, MockProvider, Persona};

use crate::error::CliError;
use crate::provider::HttpParaphraseProvider;

pub fn parse_persona(name: &str) -> Result<Persona, CliError> {
    Persona::ALL
        .iter()
        .copied()
        .find(|p| p.as_str() == name.to_lowercase())
        .ok_or_else(|| {
            CliError::validation(format!(
                "--persona must be one of child, teenager, adult, eloquent, tweet; got '{name}'"
            ))
        })
}

pub fn run(text: &str, persona: &str, language: &str, mock: bool) -> Result<(), CliError> {
    let persona = parse_persona(persona)?;
    let result = if mock {
        enrichment::paraphrase(&MockProvider, text, persona)
    } else {
        let provider = HttpParaphraseProvider::from_env(language)
            .map_err(|e| CliError::validation(e.to_string()))?;
        enrichment::paraphrase(&provider, text, persona)
    };
    match result {
        Ok(out) => {
            println!("{out}");
            Ok(())
        }
        Err(e) => Err(CliError::validation(e.to_string())),
    }
}
