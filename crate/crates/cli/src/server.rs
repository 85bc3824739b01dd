//! Stateless batch-scoring HTTP endpoint.
//!
//! `POST /score` with `{"politicalness": p, "party_probs": {party: prob}}`
//! answers `{"score": s, "angle_deg": a}`, or `{"filtered": true}` below the
//! politicalness threshold. `GET /healthz` answers 200. Validation failures
//! are 400 with field-level messages; a zero resultant (no party signal) is
//! 422. The vector set and threshold are read-only after startup.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use indexmap::IndexMap;
use serde::Deserialize;
use serde_json::json;

use ideoscale_core::positioning::PartyVectorSet;
use ideoscale_core::projection::{resultant, score_from_vector};

use crate::formats::round6;

#[derive(Clone)]
pub struct AppState {
    pub vectors: Arc<PartyVectorSet>,
    pub tau: f64,
}

#[derive(Debug, Deserialize)]
pub struct ScoreRequest {
    politicalness: f64,
    party_probs: IndexMap<String, f64>,
}

struct ApiError {
    status: StatusCode,
    message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

fn bad_request(message: impl Into<String>) -> ApiError {
    ApiError {
        status: StatusCode::BAD_REQUEST,
        message: message.into(),
    }
}

async fn healthz() -> impl IntoResponse {
    StatusCode::OK
}

async fn score(
    State(state): State<AppState>,
    payload: Result<Json<ScoreRequest>, JsonRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let Json(request) = payload.map_err(|e| bad_request(e.body_text()))?;
    let registry = state.vectors.registry();

    if !(0.0..=1.0).contains(&request.politicalness) || !request.politicalness.is_finite() {
        return Err(bad_request(format!(
            "politicalness: {} is outside [0, 1]",
            request.politicalness
        )));
    }
    for name in request.party_probs.keys() {
        if registry.id(name).is_none() {
            return Err(bad_request(format!("party_probs: unknown party '{name}'")));
        }
    }
    let mut probs = Vec::with_capacity(registry.len());
    for name in registry.names() {
        let p = *request
            .party_probs
            .get(name)
            .ok_or_else(|| bad_request(format!("party_probs: missing party '{name}'")))?;
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(bad_request(format!(
                "party_probs.{name}: {p} is outside [0, 1]"
            )));
        }
        probs.push(p);
    }

    if request.politicalness < state.tau {
        return Ok(Json(json!({ "filtered": true })));
    }
    match score_from_vector(resultant(&probs, &state.vectors)) {
        Ok(s) => Ok(Json(json!({
            "score": round6(s.value),
            "angle_deg": round6(s.angle_deg),
        }))),
        Err(e) => Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: e.to_string(),
        }),
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/score", post(score))
        .with_state(state)
}

/// Bind and serve until ctrl-c.
pub async fn serve(port: u16, vectors: PartyVectorSet, tau: f64) -> std::io::Result<()> {
    let state = AppState {
        vectors: Arc::new(vectors),
        tau,
    };
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
