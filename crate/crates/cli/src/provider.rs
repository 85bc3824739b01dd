//! HTTP paraphrase provider.
//!
//! Wire protocol: `POST <endpoint>` with JSON `{"text", "persona",
//! "language"}`, expecting `{"paraphrase": "..."}`. The endpoint and an
//! optional bearer key come from the `PARAPHRASE_ENDPOINT` and
//! `PARAPHRASE_KEY` environment variables.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use ideoscale_core::enrichment::{ParaphraseProvider, Persona, ProviderError};

pub const ENDPOINT_VAR: &str = "PARAPHRASE_ENDPOINT";
pub const KEY_VAR: &str = "PARAPHRASE_KEY";

#[derive(Debug, Serialize)]
struct ParaphraseRequest<'a> {
    text: &'a str,
    persona: &'a str,
    language: &'a str,
}

#[derive(Debug, Deserialize)]
struct ParaphraseResponse {
    paraphrase: String,
}

pub struct HttpParaphraseProvider {
    endpoint: String,
    key: Option<String>,
    language: String,
    client: reqwest::blocking::Client,
}

impl HttpParaphraseProvider {
    pub fn new(endpoint: impl Into<String>, key: Option<String>, language: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            key,
            language: language.into(),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("client construction cannot fail with static config"),
        }
    }

    /// Configure from `PARAPHRASE_ENDPOINT` / `PARAPHRASE_KEY`.
    pub fn from_env(language: impl Into<String>) -> Result<Self, ProviderError> {
        let endpoint = std::env::var(ENDPOINT_VAR)
            .map_err(|_| ProviderError::Unavailable(format!("{ENDPOINT_VAR} is not set")))?;
        let key = std::env::var(KEY_VAR).ok();
        Ok(Self::new(endpoint, key, language))
    }
}

impl ParaphraseProvider for HttpParaphraseProvider {
    fn generate(&self, text: &str, persona: Persona) -> Result<String, ProviderError> {
        let body = ParaphraseRequest {
            text,
            persona: persona.as_str(),
            language: &self.language,
        };
        let mut request = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.key {
            request = request.bearer_auth(key);
        }
        let response = request
            .send()
            .map_err(|e| ProviderError::Unavailable(e.to_string()))?;

        if response.status().as_u16() == 429 {
            let retry_after_secs = response
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.parse().ok());
            return Err(ProviderError::RateLimited { retry_after_secs });
        }
        if !response.status().is_success() {
            return Err(ProviderError::Unavailable(format!(
                "endpoint returned {}",
                response.status()
            )));
        }
        let parsed: ParaphraseResponse = response
            .json()
            .map_err(|e| ProviderError::Unavailable(format!("malformed response: {e}")))?;
        Ok(parsed.paraphrase)
    }
}
